use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised by the volatility toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("dates not strictly increasing at index {index}")]
    NonIncreasingDates { index: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series too short: need at least {required} points, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("insufficient future data: window needs {required} returns after the start, {available} available")]
    InsufficientFutureData { required: usize, available: usize },

    #[error("no data rows")]
    NoDataRows,

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tau0 too small: component tau {tau} has non-positive weight for tau0 = {tau0}")]
    Tau0TooSmall { tau: f64, tau0: f64 },

    #[error("state has {state} components but the process has {spec}")]
    StateMismatch { state: usize, spec: usize },

    #[error("chi = {value} below -1 at step {step}")]
    ChiBelowBoundary { step: usize, value: f64 },

    #[error("rank-deficient design matrix for factor fit")]
    RankDeficient,

    #[error("no overlapping observations")]
    NoOverlap,

    #[error("non-positive value {0} in log distance")]
    NonPositiveLog(f64),

    #[error("insufficient sample: need at least {required} returns, got {actual}")]
    InsufficientSample { required: usize, actual: usize },

    #[error("date {0} outside the evaluated range")]
    DateOutOfRange(NaiveDate),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Csv {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}
