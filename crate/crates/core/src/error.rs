use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver library and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {stage} at step n={n}, sample m={m}")]
    NonFinite { stage: String, n: usize, m: usize },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("problem has no closed-form oracle: {0}")]
    NoOracle(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error("repetition {rep} failed: {source}")]
    Repetition {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("replay mismatch in {file}: expected sha256 {expected}, got {actual}")]
    ReplayMismatch {
        file: String,
        expected: String,
        actual: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn non_finite(stage: &str, n: usize, m: usize) -> Self {
        Error::NonFinite {
            stage: stage.to_string(),
            n,
            m,
        }
    }

    pub(crate) fn dims(what: impl Into<String>, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            actual,
        }
    }
}
