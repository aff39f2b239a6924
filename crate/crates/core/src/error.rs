use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HeunError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeunError {
    #[error("beta = {beta} is a negative integer; the recurrence coefficient A_n vanishes")]
    InvalidBeta { beta: Complex64 },

    #[error("|z| = {abs} lies outside the evaluation disk of radius {r_max}")]
    OutOfDisk { abs: f64, r_max: f64 },

    #[error("{what} did not converge within {limit} iterations")]
    NoConvergence { what: &'static str, limit: usize },

    #[error("series trusted to degree {have}, operation needs at least {need}")]
    DegreeTooLow { have: usize, need: usize },

    #[error("alpha = 0: the delta_N condition is undefined")]
    AlphaZero,

    #[error("parameters do not satisfy the delta_N condition for N = {n}")]
    DeltaConditionViolated { n: u32 },

    #[error("polynomial tail does not vanish: |v| = {tail:e} exceeds {bound:e}")]
    VerificationFailed { tail: f64, bound: f64 },

    #[error("root index k = {k} out of range 1..={count}")]
    RootIndex { k: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl HeunError {
    /// Short name of the guard that fired.
    pub fn kind(&self) -> &'static str {
        match self {
            HeunError::InvalidBeta { .. } => "InvalidBeta",
            HeunError::OutOfDisk { .. } => "OutOfDisk",
            HeunError::NoConvergence { .. } => "NoConvergence",
            HeunError::DegreeTooLow { .. } => "DegreeTooLow",
            HeunError::AlphaZero => "AlphaZero",
            HeunError::DeltaConditionViolated { .. } => "DeltaConditionViolated",
            HeunError::VerificationFailed { .. } => "VerificationFailed",
            HeunError::RootIndex { .. } => "RootIndex",
            HeunError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
