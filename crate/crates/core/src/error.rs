use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("{what} enumerates 2^{m} hidden patterns; at most m = {limit} is supported")]
    TooManyHidden {
        what: &'static str,
        m: usize,
        limit: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("pair {id}: {reason}")]
    Pair { id: String, reason: String },

    #[error("ROC analysis needs both truth classes")]
    SingleClass,

    #[error("no results to aggregate")]
    EmptyResults,

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn pair(id: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Pair {
            id: id.into(),
            reason: reason.into(),
        }
    }
}
