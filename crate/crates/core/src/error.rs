use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    IterationLimit {
        iterations: usize,
        gap: f64,
        best_capacity: f64,
        best_input: Vec<f64>,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("infeasible coding parameters: {0}")]
    Infeasible(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("perturbation failed at atom {atom}: {reason}")]
    Perturbation { atom: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
