use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] lagdeconv::Error),

    #[error(transparent)]
    Groundwater(#[from] lagdeconv_groundwater::Error),

    #[error("reference model failed: {0}")]
    Reference(String),

    #[error("{failed} of {total} realizations failed (more than 10%); first: seed {first_seed}: {first_reason}")]
    TooManyFailures { failed: usize, total: usize, first_seed: u64, first_reason: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Error::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
