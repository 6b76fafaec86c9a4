use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain on which a function is defined or trusted.
    #[error("domain error: {0}")]
    Domain(String),
    /// A precondition on the arguments of an operation does not hold.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Evaluating a user-supplied or derived function produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
    /// A derived object (inverse function, profile string) could not be constructed.
    #[error("construction error: {0}")]
    Construction(String),
    /// An iterative numerical procedure failed to reach its tolerance.
    #[error("numeric error: {message} (partial value {partial})")]
    Numeric { message: String, partial: f64 },
    /// Index or count beyond what the object (or the integer type) can represent.
    #[error("range error: {0}")]
    Range(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::Evaluation(_) => "evaluation",
            Error::Construction(_) => "construction",
            Error::Numeric { .. } => "numeric",
            Error::Range(_) => "range",
        }
    }

    pub(crate) fn numeric(message: impl Into<String>, partial: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            partial,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
