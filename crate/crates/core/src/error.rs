use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DmeraError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("payload source has no entry for class {0}")]
    MissingPayload(String),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("irreversible instruction in block: {0}")]
    Irreversible(String),
    #[error("no unitary available for gate {0}")]
    UnknownGate(usize),
    #[error("mode {0} is not in the ordering")]
    UnmappedMode(usize),
}

pub type Result<T> = std::result::Result<T, DmeraError>;
