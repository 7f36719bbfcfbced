use thiserror::Error;

/// Errors shared by the exact and asymptotic engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tolerance not reached within {cap} terms")]
    ResourceLimit { cap: usize },

    #[error("overflow in intermediate computation: {0}")]
    Overflow(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
