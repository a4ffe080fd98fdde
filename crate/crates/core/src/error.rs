use thiserror::Error;

/// Errors produced by the turn-taking pipeline and its tooling.
#[derive(Debug, Error)]
pub enum CttmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid feature: {0}")]
    InvalidFeature(String),

    #[error("level {level} out of range for {levels} quantization levels")]
    InvalidLevel { level: usize, levels: usize },

    #[error("cross-fold read: {0}")]
    FoldLeakage(String),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CttmError {
    /// True for errors caused by bad user input or configuration, as opposed
    /// to I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, CttmError::Io(_) | CttmError::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, CttmError>;
