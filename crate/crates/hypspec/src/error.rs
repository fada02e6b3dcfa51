use std::path::{Path, PathBuf};

use hypspec_core::Error as CoreError;

/// Exit status for a check that ran but failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed cache file {}: {msg}", path.display())]
    CacheFormat { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// Budget exhausted; the partial cache was written to `path`.
    #[error("element budget exceeded; partial cache with {elements} elements written to {}", path.display())]
    Budget { path: PathBuf, elements: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn cache_format(path: &Path, msg: impl Into<String>) -> Self {
        CliError::CacheFormat {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::HypothesisViolation(_)) => EXIT_GATE,
            CliError::Core(CoreError::BudgetExceeded(_)) | CliError::Budget { .. } => EXIT_BUDGET,
            CliError::Core(CoreError::CaseViolation(_)) => EXIT_CHECK_FAILED,
            _ => EXIT_INPUT,
        }
    }
}
