use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid cat state: {0}")]
    InvalidSpec(String),

    #[error("mask band width {width} exceeds number of components {n}")]
    InvalidMask { width: usize, n: usize },

    #[error("{0} requires the uniform circular cat (unit coefficients, default positions)")]
    NonUniform(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Fock truncation tail {tail:e} exceeds threshold {threshold:e}")]
    TailBound { tail: f64, threshold: f64 },

    #[error("displacement lost {lost:e} of probability past the truncation (threshold {threshold:e})")]
    Headroom { lost: f64, threshold: f64 },

    #[error("displacement constructions disagree by {diff:e}")]
    OracleMismatch { diff: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    BadBracket { lo: f64, hi: f64 },
}
