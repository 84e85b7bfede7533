use std::fmt;

/// Errors raised across the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel construction failed: {0}")]
    Construction(String),

    #[error("numerical failure: {message} (achieved error {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    #[error("zero-count integrity failure on [{lo}, {hi}]: {message}")]
    Integrity { lo: f64, hi: f64, message: String },

    #[error("prime table too small: need limit >= {required}, have {have}")]
    TableTooSmall { required: u64, have: u64 },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn numeric(msg: impl fmt::Display, achieved: f64) -> Self {
        Error::Numeric {
            message: msg.to_string(),
            achieved,
        }
    }

    pub(crate) fn integrity(lo: f64, hi: f64, msg: impl fmt::Display) -> Self {
        Error::Integrity {
            lo,
            hi,
            message: msg.to_string(),
        }
    }

    /// True for failures of the zero-count certificate.
    pub fn is_integrity(&self) -> bool {
        matches!(self, Error::Integrity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
