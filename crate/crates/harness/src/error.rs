use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration; nothing was run.
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("simulation failed: {0}")]
    Core(#[from] sawtooth_core::Error),
    #[error("experiment failed: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Process exit code: 1 for validation, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            _ => 2,
        }
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;
