use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no eigenvalue root found on {axis} axis in bracket {index}")]
    RootBracket { axis: &'static str, index: usize },

    #[error("field grid is {found_nx}x{found_ny} cells, domain expects {nx}x{ny}")]
    GridMismatch { nx: usize, ny: usize, found_nx: usize, found_ny: usize },

    #[error("linear solve failed: non-positive pivot {value:e} at unknown {index}")]
    LinearSolve { index: usize, value: f64 },

    #[error("response has not decayed below 10% of its peak by t_end (last {last:e}, peak {peak:e})")]
    TailNotDecayed { peak: f64, last: f64 },

    #[error(transparent)]
    Core(#[from] lagdeconv::Error),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
