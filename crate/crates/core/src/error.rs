use thiserror::Error;

/// Errors raised by the algebra kernel and everything built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inputs live in different rings, or a value does not fit the ring it is used in.
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A configured resource cap (degree, t, Frobenius exponent, tries) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A length that had to be finite turned out to be infinite.
    #[error("infinite length: {0}")]
    InfiniteLength(String),

    /// A map or ring failed semantic validation.
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}
