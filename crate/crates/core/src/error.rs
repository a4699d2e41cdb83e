use std::io;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum GifsError {
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("format error: {0}")]
    FormatError(String),
    #[error("file truncated: {0}")]
    TruncatedFile(String),
    #[error("corrupt record {index}: {reason}")]
    CorruptRecord { index: usize, reason: String },
    #[error("training diverged at epoch {epoch}, step {step}")]
    DivergedTraining { epoch: usize, step: usize },
    #[error("mesh refinement diverged at iteration {0}")]
    RefinementDiverged(usize),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("usage: {0}")]
    UsageError(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GifsError {
    /// Short stable identifier, used by the CLI's JSON error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            GifsError::EmptyMesh => "EmptyMesh",
            GifsError::DegenerateMesh(_) => "DegenerateMesh",
            GifsError::InvalidMesh(_) => "InvalidMesh",
            GifsError::InvalidConfig(_) => "InvalidConfig",
            GifsError::FormatError(_) => "FormatError",
            GifsError::TruncatedFile(_) => "TruncatedFile",
            GifsError::CorruptRecord { .. } => "CorruptRecord",
            GifsError::DivergedTraining { .. } => "DivergedTraining",
            GifsError::RefinementDiverged(_) => "RefinementDiverged",
            GifsError::EmptyPointSet => "EmptyPointSet",
            GifsError::UsageError(_) => "UsageError",
            GifsError::Io(_) => "IoError",
            GifsError::Json(_) => "JsonError",
        }
    }
}

pub type Result<T, E = GifsError> = std::result::Result<T, E>;
