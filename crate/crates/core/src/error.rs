use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between reading a config and writing a result file.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown key `{key}`{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    UnknownKey { key: String, line: Option<usize> },

    #[error("invalid sweep axes: {0}")]
    InvalidSweep(String),

    #[error("step size underflow at t = {t} fs (h = {h:e} fs)")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {attempts} exhausted at t = {t} fs")]
    StepBudgetExhausted { t: f64, attempts: usize },

    #[error("{quantity} drifted by {deviation:e} at t = {t} fs (limit {limit:e})")]
    InvariantViolation {
        t: f64,
        quantity: &'static str,
        deviation: f64,
        limit: f64,
    },

    #[error("time series is empty")]
    EmptySeries,

    #[error("every sweep point failed ({0} points)")]
    AllPointsFailed(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Process exit status classes for the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter { .. }
            | Error::Parse { .. }
            | Error::UnknownKey { .. }
            | Error::InvalidSweep(_) => ErrorClass::Config,
            Error::StepSizeUnderflow { .. }
            | Error::StepBudgetExhausted { .. }
            | Error::InvariantViolation { .. }
            | Error::EmptySeries
            | Error::AllPointsFailed(_) => ErrorClass::Numeric,
            Error::Io { .. } => ErrorClass::Io,
        }
    }

    /// Exit code: 2 for configuration errors, 3 for numerical failures, 4 for IO.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Numeric => 3,
            ErrorClass::Io => 4,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
