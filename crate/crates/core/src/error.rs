use thiserror::Error;

/// Errors raised by the classification library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or mismatched arguments (bad prime, mismatched fields, unparsable text).
    #[error("usage error: {0}")]
    Usage(String),
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation has no closed form or construction for the requested parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Input data contradicts an identity that must hold for admissible data.
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    /// A constructed object failed one of its own checks.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Enumeration aborted because a configured budget was exhausted.
    #[error("resource limit exceeded after {visited} candidates ({found} classes found so far)")]
    ResourceLimit { visited: u64, found: u64 },
    /// A broken internal invariant; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
