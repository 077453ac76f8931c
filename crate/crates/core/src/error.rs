use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the tracking library and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix has effective rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("infeasible sparsity {sparsity} for n = {n}: no nonzero rows would remain")]
    InfeasibleSparsity { sparsity: f64, n: usize },

    #[error("thresholding factor k = {k} outside [1, {n}]")]
    ThresholdOutOfRange { k: usize, n: usize },

    #[error("angle {0} deg outside the open interval (-90, 90)")]
    AngleDomain(f64),

    #[error("empty summary window: {len} records with burn-in {burn_in}")]
    EmptyWindow { len: usize, burn_in: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config validation error: {0}")]
    ConfigValidation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors that stem from an invalid configuration rather than a
    /// failure while running.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::ConfigParse { .. } | Error::ConfigValidation(_) => true,
            Error::Context { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
