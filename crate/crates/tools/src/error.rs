use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error(transparent)]
    Core(#[from] permconc::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("invalid grid {spec:?}: {reason}")]
    Grid { spec: String, reason: &'static str },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = ToolError> = std::result::Result<T, E>;
