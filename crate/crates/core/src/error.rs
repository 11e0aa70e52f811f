use thiserror::Error;

/// A primitive was evaluated outside its domain (pole, branch cut or
/// non-finite input).
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{primitive} is undefined at {value}")]
pub struct DomainError {
    pub primitive: &'static str,
    pub value: f64,
}

impl DomainError {
    pub fn new(primitive: &'static str, value: f64) -> Self {
        Self { primitive, value }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("sampling rejected {rejected} of {attempted} candidate points: {reason}")]
    Sampling {
        attempted: usize,
        rejected: usize,
        reason: String,
    },

    #[error("normal system is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("constraint error: {0}")]
    Constraint(String),

    #[error("claim is not machine-checkable: {0}")]
    Unverifiable(String),

    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepFailure { t: f64, dt: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
