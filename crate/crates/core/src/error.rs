use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("insufficient constraints: {similar} similar and {dissimilar} dissimilar pairs")]
    InsufficientConstraints { similar: u64, dissimilar: u64 },

    #[error("no neighbors: instance base is empty")]
    NoNeighbors,

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid loss {0}: must lie in [0, 1]")]
    InvalidLoss(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
