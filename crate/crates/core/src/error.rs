use thiserror::Error;

/// Failure of a design computation.
///
/// `Validation` covers inputs that violate a type invariant and always names
/// the offending field. `Domain` covers well-formed inputs whose derived
/// quantities leave their valid domain or hit a singularity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("{0}")]
    Domain(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    /// Field path for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Validation { field, .. } => Some(field),
            Error::Domain(_) => None,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Error::Validation { message, .. } => message,
            Error::Domain(message) => message,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
