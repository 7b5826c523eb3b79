//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, and computation.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input bytes; `offset` is the byte position where parsing failed.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// Structurally valid input that violates the annotation schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A value outside its documented range (e.g. a sample outside [0, 1]).
    #[error("range error: {0}")]
    Range(String),

    /// An argument that violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation refused because it would exceed a configured budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            msg: msg.into(),
        }
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
