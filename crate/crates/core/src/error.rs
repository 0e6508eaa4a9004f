use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NoConvergence {
        iterations: usize,
        last_estimate: f64,
        last_iterate: Vec<f64>,
    },

    #[error("matrix has zero spectral radius and cannot be rescaled")]
    ZeroSpectralRadius,

    #[error("normal matrix is singular; a positive ridge parameter is required")]
    RegularizationRequired,

    #[error("state became non-finite or exceeded bounds at step {step}")]
    Divergence { step: usize },

    #[error("time {t} is outside the sampled horizon [{start}, {end}]")]
    OutOfHorizon { t: f64, start: f64, end: f64 },

    #[error("readout has not been trained")]
    Untrained,

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),

    #[error("{0}")]
    Empty(&'static str),

    #[error("bad time grid in {path}: {reason}")]
    Grid { path: PathBuf, reason: String },

    #[error("bad reservoir file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
