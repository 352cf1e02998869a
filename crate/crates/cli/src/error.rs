use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: cannot parse {content:?} as a number")]
    Parse { line: usize, content: String },
    #[error("dataset contains no values")]
    EmptyData,
    #[error("all values equal {value}; cannot map to [0, 1]")]
    DegenerateDomain { value: f64 },
    #[error("value {value} lies outside the domain [{lo}, {hi}]")]
    DomainViolation { value: f64, lo: f64, hi: f64 },
    #[error("{flag} is required for the {strategy} strategy on sampled data")]
    MissingPrior {
        flag: &'static str,
        strategy: &'static str,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] momcut::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
