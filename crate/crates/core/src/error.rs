use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller violated an operation's precondition (wrong feature, empty input, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A represented set was larger than the enumeration cap.
    #[error("represented set exceeds enumeration cap of {cap}")]
    Overflow { cap: u128 },

    /// A feature description could not be turned into a valid feature type.
    #[error("invalid feature: {0}")]
    InvalidFeature(String),

    /// Textual or structured input did not parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// Brute-force search exceeded its budget.
    #[error("oracle budget exceeded: {0}")]
    Budget(String),

    /// Dataset generation failed.
    #[error("generation error: {0}")]
    Generation(String),

    /// An internal invariant did not hold. Indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
