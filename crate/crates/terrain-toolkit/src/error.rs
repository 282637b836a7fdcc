//! Error type shared by every module of the toolkit.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TerrainError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {format} file {path}: {reason}")]
    Format {
        format: &'static str,
        path: PathBuf,
        reason: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field contains {0} void cells; run void filling first")]
    VoidsPresent(usize),

    #[error("field of {width}x{height} cells is too small for search radius {radius}")]
    FieldTooSmall {
        width: usize,
        height: usize,
        radius: usize,
    },

    #[error("cell ({row}, {col}) lies inside the {margin}-cell border margin")]
    InsideBorderMargin {
        row: usize,
        col: usize,
        margin: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("design matrix is rank deficient; near-collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("simulation diverged: {0}")]
    Unstable(String),

    #[error("calibration schema violation: {0}")]
    CalibrationSchema(String),

    #[error("{failed} of {total} corpus entries failed")]
    BatchFailures { failed: usize, total: usize },
}

impl TerrainError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TerrainError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(
        format: &'static str,
        path: impl Into<PathBuf>,
        reason: impl Into<String>,
    ) -> Self {
        TerrainError::Format {
            format,
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, TerrainError>;
