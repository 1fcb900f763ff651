use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown target `{0}` (see `qnlcc list`)")]
    UnknownTarget(String),
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },
    #[error(transparent)]
    Core(#[from] qnlcc::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 2 for anything rooted in bad input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownTarget(_) | CliError::InvalidParam { .. } | CliError::Core(_) | CliError::Json(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
