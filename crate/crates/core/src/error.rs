use crate::lattice::DyadicInterval;
use thiserror::Error;

pub type Result<T, E = DyadError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DyadError {
    #[error("depth {0} is outside the supported range 1..={max}", max = crate::lattice::MAX_DEPTH)]
    DepthOutOfRange(u32),

    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: u32, found: u32 },

    #[error("depth {depth} exceeds the dense-matrix cap {cap}")]
    DepthAboveCap { depth: u32, cap: u32 },

    #[error("invalid dyadic interval {level}:{position}")]
    InvalidInterval { level: u32, position: u64 },

    #[error("cannot parse interval `{0}` (expected `level:position`)")]
    IntervalSyntax(String),

    #[error("interval {0} is at the finest level and has no children")]
    NoChildren(DyadicInterval),

    #[error("the root interval has no parent")]
    NoParent,

    #[error("h_{outer} is not constant on {inner}: inner must be strictly contained in outer")]
    NotStrictlyContained {
        outer: DyadicInterval,
        inner: DyadicInterval,
    },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("weight density must be strictly positive; cell {cell} has {value}")]
    NonPositiveWeight { cell: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function has nonzero mean {0}; this operation needs the Haar span")]
    NonZeroMean(f64),

    #[error("sparsity target {target} infeasible; achieved ratio {achieved}")]
    InfeasibleSparsity { target: f64, achieved: f64 },

    #[error("power iteration did not converge after {iterations} steps (estimate {estimate}, gap {gap})")]
    NoConvergence {
        estimate: f64,
        gap: f64,
        iterations: usize,
    },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
