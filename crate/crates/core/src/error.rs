//! Crate-wide error type with an exit-code mapping for the CLI.

use crate::exact::ExactError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("graph is not distance-regular: {witness}")]
    NotDistanceRegular { witness: String },
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    #[error("scalar field unsupported: {0}")]
    UnsupportedField(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Failures of identities the theory guarantees; these indicate a bug,
    /// never a property of the input.
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::CrossCheck(msg.into())
    }

    /// Prefixes the message with the failing check's name, keeping the kind
    /// (and with it the exit code) intact.
    pub fn context(self, name: &str) -> Self {
        match self {
            Error::Invalid(m) => Error::Invalid(format!("{name}: {m}")),
            Error::NotDistanceRegular { witness } => Error::NotDistanceRegular {
                witness: format!("{name}: {witness}"),
            },
            Error::NotBipartite(m) => Error::NotBipartite(format!("{name}: {m}")),
            Error::UnsupportedField(m) => Error::UnsupportedField(format!("{name}: {m}")),
            Error::CrossCheck(m) => Error::CrossCheck(format!("{name}: {m}")),
            io @ Error::Io(_) => io,
        }
    }

    /// Process exit code for the CLI front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Io(_) => 1,
            Error::NotDistanceRegular { .. } => 2,
            Error::NotBipartite(_) => 3,
            Error::UnsupportedField(_) => 4,
            Error::CrossCheck(_) => 5,
        }
    }
}

impl From<ExactError> for Error {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::IncompatibleRadicands(_, _) | ExactError::RadicandTooLarge => {
                Error::UnsupportedField(e.to_string())
            }
            other => Error::CrossCheck(other.to_string()),
        }
    }
}
