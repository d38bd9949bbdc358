use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into three families that the command-line front end maps to
/// distinct exit codes: input validation, reference-constant (oracle)
/// failures, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),

    #[error("the sup-norm derivative is undefined at the zero function")]
    ZeroFunction,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty sample")]
    EmptySample,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("covariance is not positive semidefinite (pivot {pivot:.3e} at index {index})")]
    NotPositiveSemidefinite { index: usize, pivot: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("reference constant `{name}` could not be computed: {reason}")]
    Oracle { name: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn oracle(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Oracle {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input (as opposed to I/O or
    /// reference-constant failures). Malformed JSON counts as bad input.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Oracle { .. } | Error::Io(_) | Error::Csv(_) => false,
            Error::Json(e) => !e.is_io(),
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
