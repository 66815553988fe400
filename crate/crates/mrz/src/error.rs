use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Check(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<mrz_core::Error> for CliError {
    fn from(err: mrz_core::Error) -> Self {
        use mrz_core::Error as E;
        match err {
            E::InvalidTree(v) => CliError::Check(v.to_string()),
            E::ConditionViolated { .. } | E::NotAMartingale { .. } | E::ClosedFormMismatch { .. } => {
                CliError::Check(err.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<mrz_core::ParamsError> for CliError {
    fn from(err: mrz_core::ParamsError) -> Self {
        CliError::Usage(err.to_string())
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// A mathematical check failed; details are in the written report.
    Fail,
}

impl From<Status> for ExitCode {
    fn from(status: Status) -> Self {
        match status {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(2),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
