use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// A brute-force enumeration would exceed the configured element cap.
    #[error("oracle size cap exceeded: |D| = {size} > {cap}")]
    CapExceeded { size: String, cap: u64 },

    #[error("value does not fit the {scalar} exact-integer range: {what}")]
    Overflow { scalar: &'static str, what: String },

    /// An identity that must hold for valid parameters did not.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
