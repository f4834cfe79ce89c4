use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] arima_ao::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 2 for bad input, 3 for model or numerical failures, 4 for bugs.
    pub fn exit_code(&self) -> u8 {
        use arima_ao::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Model(E::Config(_) | E::Index { .. }) => 2,
            CliError::Model(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Model(arima_ao::Error::Rank(_)) => Some(
                "the regressors are collinear; check that the input column is not constant, \
                 or lower the AR order",
            ),
            CliError::Model(arima_ao::Error::Stability { .. }) => {
                Some("every root of the AR polynomial must lie outside the unit circle")
            }
            CliError::Model(arima_ao::Error::Length(_)) => Some("supply a longer series or a smaller model order"),
            CliError::Model(arima_ao::Error::Convergence(_)) => {
                Some("try a different order, or fit without an intercept")
            }
            _ => None,
        }
    }
}
