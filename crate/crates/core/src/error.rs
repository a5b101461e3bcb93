use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("field mismatch: expected an element of {expected}, got {got}")]
    FieldMismatch { expected: String, got: String },

    #[error("not a quadratic extension: class {0} is already a square")]
    NotAnExtension(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unsupported-shape: {0}")]
    UnsupportedShape(String),

    #[error("unsupported-class: {0}")]
    UnsupportedClass(String),

    #[error("not-division: {reason} (witness: {witness})")]
    NotDivision { reason: String, witness: String },

    #[error("needs-assertion: {0}")]
    NeedsAssertion(String),

    #[error("gap: upper bound {upper} differs from completion value {lower}")]
    Gap { upper: String, lower: String },

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// A cross-check between two independent routes disagreed.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// True for the errors where the engine declines to answer rather than
    /// the input being malformed.
    pub fn is_declined(&self) -> bool {
        matches!(
            self,
            Error::Unsupported(_)
                | Error::UnsupportedShape(_)
                | Error::UnsupportedClass(_)
                | Error::NotDivision { .. }
                | Error::NeedsAssertion(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
