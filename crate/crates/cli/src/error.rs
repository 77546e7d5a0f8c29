use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Reduction(#[from] recombination::Error),
    #[error("reduction failed validation (max moment error {0:e})")]
    Invalid(f64),
}

impl CliError {
    /// 2 when no valid reduction could be produced, 1 for bad input or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Reduction(e) if e.is_escalation() => 2,
            CliError::Reduction(recombination::Error::RankDeficient) | CliError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
