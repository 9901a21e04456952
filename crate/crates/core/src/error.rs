use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid functions are not combinable: {0}")]
    GridMismatch(String),
    #[error("invalid component mask: {0}")]
    InvalidMask(String),
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("angle undefined: {0} has zero norm")]
    UndefinedAngle(&'static str),
    #[error("invalid gas state: {0}")]
    InvalidState(String),
    #[error("upstream flow is not supersonic (M = {0})")]
    Subsonic(f64),
    #[error("shock detached: deflection {deflection_deg:.4} deg exceeds maximum {max_deg:.4} deg at M = {mach:.4}")]
    Detached {
        mach: f64,
        deflection_deg: f64,
        max_deg: f64,
    },
    #[error("wave matching failed at {interaction}: {reason}")]
    Matching { interaction: &'static str, reason: String },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("{scheme} diverged at step {step}, cell ({i}, {j}): {reason}")]
    Divergence {
        scheme: String,
        step: usize,
        i: usize,
        j: usize,
        reason: String,
    },
    #[error("ensemble error: {0}")]
    Ensemble(String),
    #[error("estimator error: {0}")]
    Estimator(String),
    #[error("degenerate weights: normalization sum {0:e}")]
    DegenerateWeights(f64),
    #[error("all Prager-Synge tries failed: {}", .0.join("; "))]
    AllTriesFailed(Vec<String>),
    #[error("effectivity index undefined: true error norm is zero")]
    ZeroTrueError,
    #[error("format error: {0}")]
    Format(String),
    #[error("refusing to overwrite {0} (use --force)")]
    Exists(PathBuf),
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable CLI exit code: 1 validation, 2 solver divergence, 3 estimator failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 2,
            Error::UndefinedAngle(_)
            | Error::Estimator(_)
            | Error::DegenerateWeights(_)
            | Error::AllTriesFailed(_)
            | Error::ZeroTrueError => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
