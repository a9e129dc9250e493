use thiserror::Error;

/// Errors produced by the discriminator toolkit.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("state vectors have mixed dimensions ({0} vs {1})")]
    MixedDims(usize, usize),

    #[error("no strictly increasing {n}-tuples exist in {{1..{m}}}")]
    EmptyTupleSet { n: usize, m: usize },

    #[error("invalid permutation images: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("eigensolver failed to converge")]
    EigenFailed,

    #[error("determinant has non-negligible imaginary part {0:.3e}; input is not Hermitian")]
    NonHermitianDeterminant(f64),

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rejection cap {cap} exceeded while sampling a linearly independent program")]
    RejectionCapExceeded { cap: usize },

    #[error("analytic and bisection values of c disagree: {analytic} vs {bisected}")]
    CrossValidationFailed { analytic: f64, bisected: f64 },
}
