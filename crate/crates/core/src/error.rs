use thiserror::Error;

pub type Result<T> = std::result::Result<T, KoopmanError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KoopmanError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("half-width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("Koopman matrix is near-defective (eigenvector condition {condition:.3e} > {limit:.0e})")]
    NearDefective { condition: f64, limit: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("exp overflow: Re(lambda)*t = {exponent:.3e} exceeds {limit} at t = {time}")]
    Overflow { exponent: f64, limit: f64, time: f64 },

    #[error("quadrature needs at least {required} nodes per dimension, got {given}")]
    InsufficientNodes { required: usize, given: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl KoopmanError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            KoopmanError::Io(_) => 1,
            KoopmanError::Schema { .. } | KoopmanError::Validation(_) => 2,
            KoopmanError::NearDefective { .. } => 3,
            KoopmanError::NonFinite(_) | KoopmanError::Overflow { .. } => 4,
            // programming-level misuse surfaced through the CLI is reported
            // as a configuration problem
            _ => 2,
        }
    }
}

impl From<std::io::Error> for KoopmanError {
    fn from(e: std::io::Error) -> Self {
        KoopmanError::Io(e.to_string())
    }
}
