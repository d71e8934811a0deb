use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("unsupported rank {rank}: {reason}")]
    UnsupportedRank { rank: usize, reason: &'static str },

    #[error("generator index {index} outside 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("expected a pure grade-{expected} element")]
    NotPureGrade { expected: usize },

    #[error("invalid multiplicity {0}; must be at least 1")]
    InvalidMultiplicity(usize),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("spectral decomposition failed (residual {residual:e})")]
    Spectral { residual: f64 },

    #[error("matrix is not in the span of the J family (residual {residual:e})")]
    NotInSpan { residual: f64 },

    #[error("degenerate fibre point: {0}")]
    DegeneratePoint(String),

    #[error("vector is not tangent to the fibre (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("finite-difference step must be positive")]
    NonPositiveStep,

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("field outside the supported classes: {0}")]
    UnsupportedField(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
