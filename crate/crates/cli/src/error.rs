use skewlab::SkewError;
use thiserror::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Input { context: String, source: SkewError },

    #[error("{0}")]
    SearchCap(SkewError),

    #[error("{0}")]
    Violation(String),

    #[error("{0}")]
    Identity(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Usage(_) | CliError::Input { .. } | CliError::Io { .. } => 2,
            CliError::SearchCap(_) => 3,
            CliError::Identity(_) => 4,
        }
    }
}

impl From<SkewError> for CliError {
    fn from(e: SkewError) -> Self {
        match e {
            SkewError::SearchSpaceTooLarge { .. } => CliError::SearchCap(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, SkewError> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Input { context: what.into(), source })
    }
}
