use std::path::PathBuf;

use intobs_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Table { path: PathBuf, line: usize, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for missing data, bad input or usage; 1 when a computation contradicts itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Inconsistent(_) | CoreError::NoMatch { .. }) => 1,
            _ => 2,
        }
    }
}
