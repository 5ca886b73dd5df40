use thiserror::Error;

/// Errors raised by the radial calculus and the Cauchy solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    /// `p^x` would leave the representable range; `exponent` is `x * ln p`.
    #[error("magnitude guard exceeded: |x ln p| = {exponent} > {limit}")]
    Magnitude { exponent: f64, limit: f64 },

    #[error("divergent series: {0}")]
    Divergence(String),

    #[error("invalid radial function: {0}")]
    InvalidFunction(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("weak degeneration violated: gamma = {gamma} must satisfy 0 <= gamma < min(1, alpha) = {limit}")]
    WeakDegeneration { gamma: f64, limit: f64 },

    #[error("no local radius in [{floor}, {cap}] gives a contraction factor <= 1/2")]
    InfeasibleRadius { floor: i64, cap: i64 },

    #[error("iteration did not converge after {iterations} steps (last difference {last_diff:e})")]
    NonConvergence {
        iterations: usize,
        last_diff: f64,
        history: Vec<f64>,
    },

    #[error("contraction violated at level {level}: {reason}")]
    ContractionViolation { level: i64, reason: String },

    #[error("truncation budget exceeded at level {level}: remainder {remainder:e} > budget {budget:e}; lower the left cutoff")]
    BudgetExceeded { level: i64, remainder: f64, budget: f64 },

    #[error("residual at level {level} is indeterminate: {reason}; extend the solution further")]
    IndeterminateResidual { level: i64, reason: String },

    #[error("nonlinearity metadata violated: {0}")]
    Metadata(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Failures of an iterative process, as opposed to violated preconditions.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::BudgetExceeded { .. })
    }
}
