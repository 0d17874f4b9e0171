//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by graph construction, estimation, and fitting routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument was out of range or inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An edge-list file could not be read.
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An edge-list line could not be parsed.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A dense oracle was asked to factor a matrix above its size guard.
    #[error("dense computation refused for n = {n} (limit {limit}); use the stochastic estimator")]
    TooLargeForDense { n: usize, limit: usize },

    /// Two spectral artifacts that must share a basis and order do not.
    #[error("incompatible artifacts: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }
}
