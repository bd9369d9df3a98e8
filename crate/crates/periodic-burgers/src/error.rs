//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched grids, dimensions or bases between operands.
    #[error("input error: {0}")]
    Input(String),

    /// Argument outside the operator's domain (e.g. negative derivative order).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid run configuration; `path` names the offending field.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// Newton iteration exhausted its budget. Carries the residual history so
    /// callers can decide whether to refine the continuation step.
    #[error("newton iteration did not converge after {iterations} steps (last residual {last:e})")]
    Nonconvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    /// Inner Krylov solve broke down or stalled.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// Time integration blew up; suggests more steps per period.
    #[error("oracle instability: {0}")]
    OracleUnstable(String),

    /// Power iteration on the period map failed to settle.
    #[error("ground-state iteration did not settle: {0}")]
    GroundState(String),

    /// A machine-checked invariant or comparison threshold failed.
    #[error("invariant failure: {0}")]
    InvariantFailure(String),

    /// The uniqueness certificate did not hold; a finding, not a crash.
    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
