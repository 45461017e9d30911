use std::io;

use thiserror::Error;

/// Errors produced by the fastpi library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation (bad ratio, mismatched shapes, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense allocation would exceed the configured size guard.
    #[error("capacity error: {what} needs {entries} entries, limit is {limit}")]
    Capacity {
        what: String,
        entries: usize,
        limit: usize,
    },

    /// A text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The reordered matrix has nonzeros where the block structure says there are none.
    #[error("structural violation: {0}")]
    StructuralViolation(String),

    /// A dense kernel failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors raised by the numerical pipeline rather than by bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Capacity { .. } | Error::StructuralViolation(_) | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
