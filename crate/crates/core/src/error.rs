use thiserror::Error;

use crate::problem::ConstraintKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("angle undefined for a zero coefficient vector")]
    UndefinedAngle,

    #[error("operation not supported for {0:?} constraints")]
    UnsupportedKind(ConstraintKind),

    #[error("constraint boundary is empty")]
    NoBoundary,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
