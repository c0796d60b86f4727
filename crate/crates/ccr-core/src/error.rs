use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum CcrError {
    /// Caller passed arguments outside an operation's contract.
    #[error("usage error: {0}")]
    Usage(String),
    /// Input is structurally valid but outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Data failed a structural validity check.
    #[error("validation error: {0}")]
    Validation(String),
    /// A floating-point quantity violated a numerical tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// An exhaustive enumeration would exceed the configured cap.
    #[error("enumeration size {size} exceeds cap {cap}; rerun with a larger cap (--cap) to proceed")]
    CapExceeded { size: u128, cap: u64 },
    /// Input text could not be parsed; message carries position context.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CcrError>;
