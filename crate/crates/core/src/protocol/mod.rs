//! Exact state-vector checks of the detection machinery: the pi-pulse sign
//! reversal of `H`, the two-copy interference protocol and the ancilla-controlled
//! interferometric protocol.
//!
//! Rotations follow `R_a(theta) = exp(-i theta sigma^a / 2)`. Spin matrices use the
//! local bit basis (down, up); the control qubit uses the usual computational
//! basis `|0>, |1>` with `sigma^z |0> = |0>`.

mod gates;
mod runs;

pub use gates::{
    pauli, sign_reversal_unitary, verify_sign_reversal, Axis, GateSequence, Rotation, SectorGate, MAX_FULL_SPACE_SITES,
};
pub use runs::{
    backward_evolve, protocol_run, run_interference, run_interferometric, Interference, Interferometric,
    InterferometricPath, Protocol, ProtocolRun, ProtocolSetup,
};
