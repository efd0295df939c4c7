//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by ingestion, fitting, optimization and backtesting.
#[derive(Debug, Error)]
pub enum Error {
    /// Input stream unusable as a whole (empty file, missing header, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A cell or row failed to parse.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// A value violated a domain invariant (non-positive price, ...).
    #[error("validation error at row {row}, ticker {ticker}: {message}")]
    Validation {
        row: usize,
        ticker: String,
        message: String,
    },

    /// Series could not be aligned on a common date grid.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Not enough observations for the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Sample is degenerate (zero variance, too few points) for fitting.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Maximum-likelihood search failed to produce finite parameters.
    /// Carries the initialization and the last iterate for diagnosis.
    #[error("fit error: {message}; init = {init:?}, last iterate = {last:?}")]
    Fit {
        message: String,
        init: Vec<f64>,
        last: Vec<f64>,
    },

    /// No feasible portfolio with positive excess return.
    #[error("infeasible tangency: {0}")]
    InfeasibleTangency(String),

    /// The LP (or other solver) failed; carries the solver status.
    #[error("optimization error: solver status {status}")]
    Optimization { status: String },

    /// Backtest window does not fit in the panel.
    #[error("window error: required {required} rows, available {available}")]
    Window { required: usize, available: usize },

    /// PWF metric grid does not cover the required probability band.
    #[error("grid coverage error: missing band {0}")]
    Coverage(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
