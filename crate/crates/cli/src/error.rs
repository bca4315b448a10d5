use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] contam_runs::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}{}: {message}", path.display(), at_line(*line))]
    Parse { path: PathBuf, line: u64, message: String },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 usage, 2 validation, 3 budget or size refusal, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        use contam_runs::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::SizeLimit { .. } | E::Budget { .. }) => 3,
            CliError::Core(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn at_line(line: u64) -> String {
    if line == 0 { String::new() } else { format!(", line {line}") }
}
