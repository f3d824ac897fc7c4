use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] coma_core::Error),
    #[error("write failed: {0}")]
    Output(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
