use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    GraphParse { line: usize, message: String },

    #[error("unknown node id {0}")]
    UnknownNode(u32),

    #[error("invalid level sequence: {0}")]
    InvalidTree(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("patterns are defined over different trees")]
    TreeMismatch,

    #[error("query syntax error at line {line}, column {column}: {message}")]
    QueryParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency table for parent {key} is missing (levels processed out of order)")]
    Sequencing { key: String },

    #[error("lhs pattern {key} is not in the store; mine it first (e.g. with a larger --max-nodes or a --tree filter that includes it)")]
    LhsNotMined { key: String },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error(
        "store was built for graph fingerprint {stored} but the graph has fingerprint {actual}"
    )]
    StaleStore { stored: String, actual: String },

    #[error("{}: {message}", path.display())]
    StoreFile { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
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

    pub(crate) fn store_file(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::StoreFile {
            path: path.into(),
            message: message.into(),
        }
    }
}
