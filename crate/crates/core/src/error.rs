use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported ladder size L={0} (supported range is 2..=8)")]
    Size(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state is not normalized (|psi| = {norm})")]
    NotNormalized { norm: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} sector (disorder seed {seed:?})")]
    EigenNonConvergence { dim: usize, seed: Option<u64> },

    #[error("OTOC cross-check failed: trace and commutator forms differ by {discrepancy:e}")]
    CrossCheck { discrepancy: f64 },

    #[error("too few levels for gap ratios: need at least 3, got {0}")]
    TooFewLevels(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("fit needs at least {needed} points in window, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-positive value {value} at abscissa {at} inside a log-space fit window")]
    NonPositive { at: f64, value: f64 },

    #[error("degenerate abscissae: all points share x = {0}")]
    DegenerateAbscissae(f64),

    #[error("series spans {decades:.2} decades in time; at least {needed} required")]
    ShortSpan { decades: f64, needed: f64 },

    #[error("fit failed to converge after {starts} starts (best residual sum of squares {best_rss:e})")]
    FitFailed { starts: usize, best_rss: f64 },

    #[error("fit has form `{found}`, expected `{expected}`")]
    InvalidForm { expected: &'static str, found: String },

    #[error("time grids differ between the two series")]
    GridMismatch,

    #[error("per-sample values are required for this operation")]
    MissingSamples,

    #[error("contour has no fitted front")]
    Unfitted,

    #[error("gate sequence does not preserve the Sz=0 sector")]
    LeavesSector,
}

pub type Result<T> = std::result::Result<T, Error>;
