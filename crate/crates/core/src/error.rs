use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Resource,
    Integrity,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range of {requested} numbers exceeds the sieve buffer budget of {budget}; use a smaller segment")]
    BufferBudget { requested: u64, budget: u64 },

    #[error("segment lookahead missing: window ends at {window_hi} but {needed} is required")]
    MissingLookahead { window_hi: u64, needed: u64 },

    #[error("no conjectured rational factor is known for {m}-tuples")]
    NoConjecture { m: usize },

    #[error("checkpoint {path:?} failed integrity check: {reason}")]
    Integrity { path: PathBuf, reason: String },

    #[error("i/o error on {path:?}: {source}")]
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

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::NoConjecture { .. } | Error::MissingLookahead { .. } => {
                ErrorKind::Domain
            }
            Error::BufferBudget { .. } | Error::Io { .. } => ErrorKind::Resource,
            Error::Integrity { .. } => ErrorKind::Integrity,
        }
    }
}
