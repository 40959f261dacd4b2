use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Mathematical verdicts (not balanced, incomplete, ...) are never errors;
/// these variants are reserved for invalid input and failed computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The weighted Bergman space is `{0}` for `m <= n`.
    #[error("trivial space: the weighted Bergman space is {{0}} for m = {m} <= n = {n}")]
    TrivialSpace { m: u32, n: usize },

    /// A numerical procedure stopped without meeting its accuracy target.
    #[error("numerical failure: {reason}")]
    NumericalFailure {
        reason: String,
        partial: Option<f64>,
    },

    /// A user-supplied function returned a non-finite value.
    #[error("evaluation error at {at}: {message}")]
    Evaluation { at: f64, message: String },

    /// A result overflowed the floating-point range.
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn failure(reason: impl Into<String>, partial: Option<f64>) -> Self {
        Error::NumericalFailure {
            reason: reason.into(),
            partial,
        }
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::TrivialSpace { .. }
                | Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
