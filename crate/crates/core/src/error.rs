//! Structured error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("index {index} out of range in {context} (len {len})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        len: usize,
    },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("matrix assembled by {context} is not positive definite")]
    NotPositiveDefinite { context: &'static str },

    #[error("eigendecomposition of {n}x{n} matrix failed to converge")]
    EigFailed { n: usize },

    #[error(
        "bisection bracket invalid on [{lower}, {upper}]: f(lower) = {f_lower}, f(upper) = {f_upper}"
    )]
    BracketViolation {
        lower: f64,
        upper: f64,
        f_lower: f64,
        f_upper: f64,
    },

    #[error("invariant violated in {context}: {detail}")]
    InvariantViolation {
        context: &'static str,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
