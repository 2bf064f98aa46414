//! Error type shared by every module of the engine.

use std::path::PathBuf;

use chrono::NaiveDate;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Process exit code for invalid input or configuration.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code for filesystem failures.
pub const EXIT_IO: i32 = 3;
/// Process exit code for numerical failures (zero variance, singular designs).
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty manifest")]
    EmptyManifest,

    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),

    #[error("overlapping exclusions for \"{id}\": {first_end} is not before {second_start}")]
    OverlappingExclusions {
        id: String,
        first_end: NaiveDate,
        second_start: NaiveDate,
    },

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("parse error in {}{}: {message}", .path.display(), .line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("invalid field `{field}`{}: {message}", .entry.as_ref().map(|e| format!(" in entry \"{e}\"")).unwrap_or_default())]
    InvalidField {
        entry: Option<String>,
        field: &'static str,
        message: String,
    },

    #[error("duplicate date {date} at line {line}")]
    DuplicateDate { line: usize, date: NaiveDate },

    #[error("non-monotone dates: {date} at line {line} precedes an earlier row")]
    NonMonotoneDates { line: usize, date: NaiveDate },

    #[error("non-finite value at line {line}")]
    NonFiniteValue { line: usize },

    #[error("empty file {}", .0.display())]
    EmptyFile(PathBuf),

    #[error("non-positive price {value} on {date}")]
    NonPositivePrice { date: NaiveDate, value: f64 },

    #[error("series too short: need {needed} usable periods, have {available}")]
    TooShort { needed: usize, available: usize },

    #[error("mismatched lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty overlap")]
    EmptyOverlap,

    #[error("zero variance")]
    ZeroVariance,

    #[error("degenerate regressor")]
    DegenerateRegressor,

    #[error("rank-deficient design matrix")]
    RankDeficient,

    #[error("empty scatter")]
    EmptyScatter,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }

    /// Exit code this error maps to at the command-line boundary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::MissingFile(_) => EXIT_IO,
            Error::ZeroVariance | Error::DegenerateRegressor | Error::RankDeficient | Error::Numerical(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_VALIDATION,
        }
    }
}
