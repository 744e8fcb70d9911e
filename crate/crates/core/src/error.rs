use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped by [`ErrorKind`], which the CLI maps onto its exit
/// codes and the C ABI maps onto status codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("dangling endpoint: edge ({job}, {agent}) references unknown {missing}")]
    DanglingEndpoint {
        job: String,
        agent: String,
        missing: String,
    },
    #[error("group out of range: agent {agent} has group {group} but k = {k}")]
    GroupOutOfRange { agent: String, group: i64, k: usize },
    #[error("duplicate identifier: {0}")]
    DuplicateId(String),
    #[error("duplicate edge: ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rational arithmetic overflow")]
    Overflow,
    #[error("point is not realizable: {0}")]
    NotRealizable(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
}

/// Coarse classification used for exit and status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: parse failures, validation failures, invalid arguments.
    Input,
    /// The request is mathematically infeasible.
    Infeasible,
    /// An enumeration or size limit was exceeded.
    Guard,
    /// Exact arithmetic left the 128-bit range.
    Overflow,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotRealizable(_) | Error::Infeasible(_) => ErrorKind::Infeasible,
            Error::GuardExceeded(_) => ErrorKind::Guard,
            Error::Overflow => ErrorKind::Overflow,
            _ => ErrorKind::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
