use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::DiagnosticsRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation not available for this mode: {0}")]
    InvalidMode(String),

    /// Non-finite coefficients appeared while stepping. Carries the last
    /// emitted record when one exists.
    #[error("blow-up detected at t = {time}")]
    BlowUp {
        time: f64,
        last_record: Option<Box<DiagnosticsRecord>>,
        failure_path: Option<PathBuf>,
    },

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
