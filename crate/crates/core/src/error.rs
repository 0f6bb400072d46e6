use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem dimension must be at least 1 (subsystem {index})")]
    ZeroDimension { index: usize },

    #[error("layout needs {size} amplitudes, limit is {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("expected {expected} amplitudes, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("state norm {norm} is not within {tol:e} of 1")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("layouts differ: {left:?} vs {right:?}")]
    LayoutMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid subsystem selection {targets:?}: {reason}")]
    InvalidTargets { targets: Vec<usize>, reason: &'static str },

    #[error("operator of dimension {operator} cannot act on subsystems of joint dimension {targets}")]
    DimensionMismatch { operator: usize, targets: usize },

    #[error("matrix is not square: {rows} entries for dimension {dim}")]
    NotSquare { dim: usize, rows: usize },

    #[error("matrix is not unitary (max deviation of U^dag U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("need 1 <= q <= p, got p = {p}, q = {q}")]
    InvalidDimensions { p: usize, q: usize },

    #[error("message ({m}, {n}) out of range for p = {p}, q = {q}")]
    SymbolOutOfRange { m: usize, n: usize, p: usize, q: usize },

    #[error("basis ket {index} covered {count} times while building {operator}")]
    Coverage { operator: &'static str, index: usize, count: usize },

    #[error("subsystem {subsystem} is not in basis state |{value}>")]
    NotProductFactor { subsystem: usize, value: usize },

    #[error("joint count matrix is empty or all zero")]
    EmptyCounts,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid session configuration: {0}")]
    InvalidConfig(String),
}
