use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),

    #[error("point index {index} out of range for group of order {order}")]
    InvalidPoint { index: u64, order: u64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    /// Work or memory limit exceeded. `count` carries the exact size when known.
    #[error("capacity exceeded: {what}")]
    Capacity { what: String, count: Option<u128> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("objective is not unimodal: derivative changes sign {sign_changes} times")]
    NonUnimodal { sign_changes: usize },

    #[error("no admissible prune schedule: {0}")]
    Schedule(String),
}

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, count: Option<u128>) -> Self {
        Error::Capacity {
            what: what.into(),
            count,
        }
    }

    /// True for errors caused by size limits rather than bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
