use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A system or experiment parameter violates its domain.
    #[error("invalid {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// The optimization constraint cannot bind, so the problem has no finite optimum.
    #[error("constraint is vacuous: {0}")]
    ConstraintVacuous(String),

    /// The interference-limited SIR has no denominator without jammers.
    #[error("SIR is undefined without at least one jammer")]
    EmptyJammerSet,

    #[error("destination {dst} is unreachable from source {src}")]
    Unreachable { src: usize, dst: usize },

    #[error("closed-form cross-check failed: {0}")]
    CrossCheck(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
