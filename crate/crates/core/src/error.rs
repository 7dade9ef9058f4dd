use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The fixed-point iteration hit its cap. Carries the last iterate.
    #[error("fitness iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },

    #[error("parameters not covered by the closed form: {0}")]
    NotCovered(String),

    #[error("outside the region where the formula applies: {0}")]
    Region(String),

    #[error("excess liquidity is exhausted: systemic at any shock")]
    SystemicAtAnyShock,

    #[error("no admissible configuration-model sample after {retries} attempts")]
    Sampling { retries: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Sampling { .. } | Error::SystemicAtAnyShock
        )
    }
}
