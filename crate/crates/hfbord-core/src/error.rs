//! Shared error type.
//!
//! Failure modes map onto the tool's exit-code contract: format and dimension
//! errors are input problems (exit 2), cap exhaustion and divergence are
//! resource problems (exit 3), everything mathematical that merely *fails*
//! (a check that does not pass, a search that finds nothing) is reported as a
//! value, not an error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HfError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a chain complex: {0}")]
    NotAComplex(String),

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("divergent box tensor product: {0}")]
    Divergence(String),
}

impl From<serde_json::Error> for HfError {
    fn from(e: serde_json::Error) -> Self {
        HfError::Format(e.to_string())
    }
}
