use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite score at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least {needed} observations, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("no non-degenerate columns to evaluate")]
    NoColumns,
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("transform is not strictly monotone on the score range")]
    NonMonotone,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
