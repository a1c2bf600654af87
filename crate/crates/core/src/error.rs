use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("matrix is not a polarization kernel: {0}")]
    NotAKernel(String),

    #[error("kernel size must be even, got {0}")]
    OddKernelSize(usize),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("{what} exceeds guard limit {limit}")]
    GuardExceeded { what: String, limit: usize },

    #[error("probability out of range: {0}")]
    InvalidProbability(f64),

    #[error("rows are not stochastic: {0}")]
    NonStochastic(String),

    #[error("channel is not symmetric: {0}")]
    Asymmetric(String),

    #[error("unsupported scheme for this operation: {0}")]
    UnsupportedScheme(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
