use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("capacity exceeded: {what} is {found}, limit is {limit}")]
    Capacity {
        what: &'static str,
        found: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("no embedding found after {tries} attempts")]
    EmbedFailure { tries: usize },

    #[error("formula is unsatisfiable by construction: {0}")]
    Unsatisfiable(String),

    #[error("minimum parameter distance is undefined for a problem with no programmed terms")]
    UndefinedMpd,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
