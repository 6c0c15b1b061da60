//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T, E = CascadeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CascadeError {
    /// An argument lies outside the domain of the operation (node out of
    /// universe, window not closed, mismatched index sets, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The finite truncation ran out of room. Raised when a construction
    /// that always succeeds over an unbounded universe needs nodes the
    /// truncated universe does not have.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A generator was requested with an empty toggle set.
    #[error("degenerate generator at node {node}, row {row}: toggle set is empty")]
    DegenerateGenerator { node: u32, row: u32 },

    /// The generated permutation group is not a 2-group.
    #[error("not a 2-group: group has order {group_order}; witness {witness:?} has odd order {witness_order}")]
    NotTwoGroup {
        group_order: usize,
        witness: Vec<u32>,
        witness_order: usize,
    },

    /// Two of the three trace profiles coincide.
    #[error("profiles are not trace-separated: profiles {0} and {1} are equal")]
    NotTraceSeparated(usize, usize),

    /// Malformed text input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl CascadeError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CascadeError::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        CascadeError::Parse {
            line,
            message: msg.into(),
        }
    }
}
