use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular: leading diagonal entry is zero")]
    Singular,

    #[error("normal matrix of the least-squares problem is singular")]
    SingularNormalMatrix,

    #[error("time scales differ: {0} vs {1}")]
    ScaleMismatch(f64, f64),

    #[error("spectral norm did not converge after {iterations} iterations (last relative change {change:e})")]
    NotConverged { iterations: usize, change: f64 },

    #[error("division by zero: {0} is zero")]
    DivisionByZero(&'static str),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
