use thiserror::Error;

/// Failures of the experiment driver, grouped by CLI exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad arguments or configuration keys (exit code 1).
    #[error("usage error: {0}")]
    Usage(String),
    /// Missing, unreadable or invalid input and output files (exit code 2).
    #[error("data error: {0}")]
    Data(String),
    /// Anything that indicates a bug rather than bad input (exit code 3).
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Data(_) => 2,
            HarnessError::Internal(_) => 3,
        }
    }

    pub fn data(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        HarnessError::Data(format!("{context}: {err}"))
    }
}

impl From<copevolve::Error> for HarnessError {
    fn from(err: copevolve::Error) -> Self {
        HarnessError::Data(err.to_string())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
