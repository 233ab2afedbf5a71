use thiserror::Error;

/// Errors raised by the numerical and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series does not converge at unit argument (margin s = {margin})")]
    NonConvergent { margin: f64 },

    #[error("series diverges: p = {p} exceeds q + 1 = {}", q + 1)]
    Divergent { p: usize, q: usize },

    #[error("term budget of {budget} exhausted in {context}")]
    BudgetExceeded { budget: usize, context: &'static str },

    #[error("pole: {0}")]
    Pole(String),

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("result {value} outside [0, 1]")]
    Range { value: f64 },

    #[error("tolerance {tol:e} not met (best value {value}, error estimate {estimate:e})")]
    ToleranceNotMet { value: f64, estimate: f64, tol: f64 },

    #[error("intermediate overflow in {0}")]
    Overflow(&'static str),

    #[error("internal consistency: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
