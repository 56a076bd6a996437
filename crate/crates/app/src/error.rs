use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags, missing or malformed inputs.
    #[error("{0}")]
    Usage(String),

    /// The solver or a decomposition failed on valid input.
    #[error("numeric failure: {0}")]
    Numeric(#[source] qtt_core::Error),

    #[error("image: {0}")]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Core(#[from] qtt_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    /// Process exit code: 2 for numeric failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Numeric(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
