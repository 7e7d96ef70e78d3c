use std::io;
use std::path::Path;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Nothing to report on (exit 1).
    #[error("{0}")]
    Empty(String),
    /// Bad flags, configuration or missing inputs (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Reading or writing failed (exit 3).
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Empty(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            context: path.display().to_string(),
            source,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Io {
            context: "csv".into(),
            source: err.into(),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
