use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported dimension d={0} (exact formulas exist for d in {{2, 3}})")]
    UnsupportedDimension(usize),

    #[error("lambda={lambda} lies outside region {region} for r={r}, t={t}")]
    OutsideRegion {
        region: &'static str,
        r: f64,
        t: f64,
        lambda: f64,
    },

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(name, reason))
    }
}
