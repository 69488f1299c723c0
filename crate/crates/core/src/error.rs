use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("nested quadrature supports 1..=4 links, got {0}; use Monte-Carlo instead")]
    UnsupportedLinkCount(usize),

    #[error("quadrature did not reach tolerance {requested:e} (estimated error {achieved:e})")]
    ToleranceNotAchieved { requested: f64, achieved: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("target {target:e} is not attainable within the rate bracket [{low}, {high}]")]
    Bracket { target: f64, low: f64, high: f64 },

    #[error("average SNRs are neither all equal nor all well separated: {0:?}")]
    DegenerateSpacing(Vec<f64>),

    #[error("measurement {measurement_id} has {available} links, {requested} requested")]
    InsufficientLinks {
        measurement_id: u64,
        available: usize,
        requested: usize,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate trace entry for measurement {measurement_id}, base station {bs_id:?}")]
    DuplicateKey { measurement_id: u64, bs_id: String },

    #[error("trace contains no measurements")]
    EmptyTrace,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Rejects non-finite or nonpositive values with a domain error naming `what`.
pub(crate) fn ensure_positive(what: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be positive and finite, got {x}")))
    }
}

pub(crate) fn ensure_probability_open(what: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must lie in (0, 1), got {p}")))
    }
}
