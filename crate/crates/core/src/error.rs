use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("fewer than 2 periods")]
    TooFewPeriods,
    #[error("gap in period ids: {missing} missing between {low} and {high}")]
    PeriodGap { low: i64, high: i64, missing: i64 },
    #[error("period {0} is empty")]
    EmptyPeriod(usize),
    #[error("inconsistent feature dimension: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature dimension is zero")]
    ZeroDimension,
    #[error("unlabeled sample where a label is required{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    MissingLabel { context: Option<String> },
    #[error("input contains a single class")]
    SingleClass,
    #[error("AUC undefined: {0}")]
    AucUndefined(String),
    #[error("not enough samples: {0}")]
    NotEnoughSamples(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("testing period {t} outside testing half {low}..={high}")]
    PeriodOutOfRange { t: usize, low: usize, high: usize },
    #[error("ranking id sets differ")]
    IdSetMismatch,
    #[error("k = {k} exceeds model count {n}")]
    KExceedsModelCount { k: usize, n: usize },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
