use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: size mismatches, dangling ids, out-of-range values.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Structurally well-formed data that no generic real function realizes.
    #[error("non-realizable input: {0}")]
    NonRealizable(String),

    /// A computation was refused because it exceeds a configured bound.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// White and black degree sums disagree, or a similar global mismatch.
    #[error("inconsistent structure: {0}")]
    Inconsistent(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
