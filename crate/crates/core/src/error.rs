use thiserror::Error;

/// Errors raised by the arithmetic, geometry and dynamics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("value is zero to working precision")]
    ZeroToPrecision,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("constant polynomial has a degenerate (single point) image")]
    DegenerateImage,

    #[error("newton/hensel iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("root has exact period {found}, expected {expected}")]
    WrongPeriod { expected: usize, found: usize },

    #[error("unexpected structure: {0}")]
    Structural(String),

    #[error("certification failed on edge {edge}: {detail}")]
    Certification { edge: usize, detail: String },

    #[error("verification failed at step {step}: {detail}")]
    Verification { step: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
