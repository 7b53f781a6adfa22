use thiserror::Error;

use crate::algorithms::IterationState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("target digits must be at least 1")]
    InvalidDigits,

    #[error("unsupported algorithm order {0} (expected 2, 3 or 4)")]
    UnsupportedOrder(u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported exponent denominator {0} (expected one of 1, 2, 3, 4, 6, 12)")]
    UnsupportedExponent(i64),

    #[error("series argument {0} is not below 1")]
    Divergence(String),

    #[error("series argument {0} exceeds 0.99; use the iterative algorithms instead")]
    SlowConvergence(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("no convergence after {} iterations", trace.len().saturating_sub(1))]
    NonConvergence { trace: Vec<IterationState> },

    #[error("working precision is insufficient: {0}")]
    PrecisionInsufficient(String),

    #[error("insufficient trace: need at least two consecutive errors in (0, 1)")]
    InsufficientTrace,

    #[error("unknown constant `{0}`")]
    UnknownConstant(String),

    #[error("invalid number `{0}`")]
    Parse(String),
}
