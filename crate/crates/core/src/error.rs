//! Error taxonomy shared by the whole workspace.
//!
//! Variants map onto process exit codes: domain errors (bad inputs or
//! parameters) exit with 1, numeric errors (an algorithm failed to reach its
//! tolerance) with 2, and I/O errors with 3.

use std::path::PathBuf;

use thiserror::Error;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input or parameter outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine ran but failed to meet its accuracy contract.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Requested a combination the library deliberately does not implement.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Filesystem failure, annotated with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Unsupported(_) => 1,
            Error::Numeric(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
