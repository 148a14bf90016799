use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration; exit status 2.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("config: {0}")]
    ConfigParse(String),
    #[error(transparent)]
    Core(#[from] scl_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// A validation sweep exceeded its threshold.
    #[error("checks failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::ConfigParse(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
