use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A marginal or decision that cannot be realized under the buffer floor.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A policy produced a transition that would require a negative transmission.
    #[error("policy violation: {0}")]
    PolicyViolation(String),

    #[error("{method} did not converge after {iterations} iterations (span {span:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        span: f64,
    },

    /// The marginal-space solver ran out of iterations; carries the best
    /// iterate found and its certified gap.
    #[error("marginal solver for level {level} stopped after {iterations} iterations with gap {gap:e}")]
    BellmanNotConverged {
        level: usize,
        iterations: usize,
        best: Vec<f64>,
        value: f64,
        gap: f64,
    },

    #[error("solvers disagree: {0}")]
    Disagreement(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
