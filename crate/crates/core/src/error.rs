use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text (rational strings, JSON documents).
    #[error("parse error: {0}")]
    Parse(String),

    /// Tensor or matrix dimensions inconsistent with the declared algebra.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A precondition of an operation does not hold for the given data.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The supplied cochain is not killed by the differential.
    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    /// `d ∘ d ≠ 0` or an image escaped a kernel; always an internal defect.
    #[error("broken complex: {0}")]
    BrokenComplex(String),

    /// Input exceeds the configured size limits.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
}

impl Error {
    /// Errors caused by the caller's data rather than by a failed
    /// mathematical check.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Shape(_) | Error::TooLarge(_))
    }
}
