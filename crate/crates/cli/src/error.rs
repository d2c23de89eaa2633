use std::process::ExitCode;

use casimir_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Convergence(String),
    #[error("i/o error: {0}")]
    Io(String),
    /// Inconsistent inputs to `compare`.
    #[error("data error: {0}")]
    Data(String),
    /// The reader of stdout went away; not reported.
    #[error("broken pipe")]
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 4,
            CliError::Data(_) => 5,
            CliError::BrokenPipe => 0,
        })
    }

    pub fn field(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {msg}"))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Convergence { .. } | CoreError::Assembly(_) | CoreError::Precision(_) => {
                CliError::Convergence(e.to_string())
            }
            CoreError::Io(_) => CliError::Io(e.to_string()),
            CoreError::Domain(_) | CoreError::Range(_) | CoreError::Parse { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::BrokenPipe;
        }
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => io.into(),
                other => CliError::Io(format!("{other:?}")),
            }
        } else {
            CliError::Data(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
