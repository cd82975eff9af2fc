//! Criterion benchmarks for the dense pipeline live in `benches/`.
