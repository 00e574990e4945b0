use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("diagram sizes do not match: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("algebra contexts do not match")]
    ContextMismatch,
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("diagram is not a permutation diagram")]
    NotAPermutationDiagram,
    #[error("ideal intersection is zero")]
    ZeroIdeal,
    #[error("S covers every column index; no retraction target remains")]
    FullS,
    #[error("generator verification failed: {0}")]
    VerificationFailed(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("ring not supported here: {0}")]
    RingUnsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
