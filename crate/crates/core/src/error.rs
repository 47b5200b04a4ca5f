use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mesh needs at least one cell per side")]
    EmptyMesh,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero pivot in column {0} of the LDLᵀ factorization")]
    ZeroPivot(usize),
    #[error("system dimension {dim} exceeds the direct-solver cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("MinRes breakdown after {iterations} iterations with residual {residual:e}")]
    Breakdown { iterations: usize, residual: f64 },
    #[error("field degree {0} exceeds the supported maximum of 2")]
    UnsupportedDegree(usize),
    #[error("tail of the remainder series cannot be bounded: {0}")]
    UnboundedTail(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
