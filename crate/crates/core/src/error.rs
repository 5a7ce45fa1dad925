use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    Dimension { min: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Mismatch { expected: usize, got: usize },
    #[error("fiber dimension 2^{half} exceeds the cap of {cap}")]
    TooLarge { half: usize, cap: usize },
    #[error("zero covector")]
    ZeroCovector,
    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },
    #[error("singular: {0}")]
    Singular(String),
    #[error("not positive definite: {0}")]
    NotPositive(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("not Hermitian: residual {0:e}")]
    NotHermitian(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
