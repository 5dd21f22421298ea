use arctic_core::ArcticError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ArcticError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit code when the run completes and some check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_OTHER: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(ArcticError::Argument(_)) => EXIT_ARGUMENT,
            CliError::Core(ArcticError::Capacity(_)) => EXIT_CAPACITY,
            _ => EXIT_OTHER,
        }
    }
}
