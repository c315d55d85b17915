use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for {len} tensor factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("problem too large: {0}")]
    Sizing(String),

    #[error("witness extraction requires an entangled verdict with a certificate")]
    MissingCertificate,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
