use thiserror::Error;

/// Errors raised across the laboratory.
///
/// Disconnected distance queries are not errors; they return an infinite
/// [`crate::metric::DistanceResult`].
#[derive(Debug, Error)]
pub enum LfppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("internal algorithm error: {0}")]
    Algorithm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LfppError>;
