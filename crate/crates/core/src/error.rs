use dca_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DcaError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, DcaError>;
