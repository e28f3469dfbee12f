use std::path::PathBuf;

use thiserror::Error;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input outside an operation's domain or precondition.
    Domain,
    /// Grid cache missing, corrupt or unwritable.
    Cache,
    /// Numerical procedure failed to meet its contract.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: argument {value} outside domain ({requirement})")]
    Domain {
        op: &'static str,
        value: f64,
        requirement: String,
    },

    #[error("{op}: precondition violated: {message}")]
    Precondition { op: &'static str, message: String },

    #[error("{op}: input index {index} is invalid: {message}")]
    InvalidInput {
        op: &'static str,
        index: usize,
        message: String,
    },

    #[error("argument tracking lost continuity near u = {u}: {message}")]
    TrackingFailure { u: f64, message: String },

    #[error("quadrature tolerance not met within node budget (achieved {achieved:e})")]
    ToleranceNotMet { achieved: f64 },

    #[error("height {t} outside grid range [{t_min}, {t_max}]")]
    OutOfRange { t: f64, t_min: f64, t_max: f64 },

    #[error("grid exhausted: height {needed} required but grid ends at {t_max}")]
    GridExhausted { needed: f64, t_max: f64 },

    #[error("{op}: no bracketing interval: {message}")]
    NoBracket { op: &'static str, message: String },

    #[error("{op}: no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{op}: memory budget exceeded ({required} bytes > {budget} bytes)")]
    Budget {
        op: &'static str,
        required: u64,
        budget: u64,
    },

    #[error("n = {n} is outside the Fermat class (exponent must be at least 3)")]
    FermatClass { n: u32 },

    #[error("{op}: desk-scale infeasible: {message}")]
    Infeasible { op: &'static str, message: String },

    #[error("euler product tail bound {bound:e} exceeds tolerance {tol:e}")]
    TailBound { bound: f64, tol: f64 },

    #[error("{op}: ill-conditioned fit: {message}")]
    IllConditioned { op: &'static str, message: String },

    #[error("cache {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain { .. }
            | Error::Precondition { .. }
            | Error::InvalidInput { .. }
            | Error::OutOfRange { .. }
            | Error::FermatClass { .. }
            | Error::Infeasible { .. }
            | Error::GridExhausted { .. } => ErrorClass::Domain,
            Error::Cache { .. } | Error::Io { .. } => ErrorClass::Cache,
            _ => ErrorClass::Numerical,
        }
    }

    pub(crate) fn domain(op: &'static str, value: f64, requirement: impl Into<String>) -> Self {
        Error::Domain {
            op,
            value,
            requirement: requirement.into(),
        }
    }

    pub(crate) fn precondition(op: &'static str, message: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
