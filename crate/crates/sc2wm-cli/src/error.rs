use std::fmt;
use std::process::ExitCode;

/// Command failures, split by exit code: usage errors exit 2, data errors
/// exit 1. Both print to standard error.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an unusable configuration.
    Usage(String),
    /// Unreadable or invalid input data; the message carries the first
    /// failing record's locator when one exists.
    Data(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Data(_) => ExitCode::from(1),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}
