use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension g = {0}")]
    InvalidDimension(usize),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("real part of B is not positive definite (smallest eigenvalue {lambda_min:e})")]
    NonPositiveDefinite { lambda_min: f64 },

    #[error("tolerance {eps:e} is below the supported floor {floor:e}")]
    ToleranceTooTight { eps: f64, floor: f64 },

    #[error("tolerance {eps:e} needs a truncation radius beyond the cap {cap}")]
    ToleranceUnreachable { eps: f64, cap: f64 },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("theta vanishes at this point (|theta| = {modulus:e}); the distribution is undefined")]
    DivisorHit { modulus: f64 },

    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: i128 },

    #[error("invalid split: g1 = {g1} for g = {g}")]
    InvalidSplit { g1: usize, g: usize },

    #[error("parameters must be real for this operation")]
    NotReal,

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sample covariance is singular")]
    DegenerateSample,

    #[error("no chi-square cell reaches the expected count threshold")]
    TooFewSamples,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all coordinates of the statistical map vanish (singular point of the theta divisor)")]
    IndeterminatePoint,

    #[error("no zero of theta found on the search region")]
    NoZeroFound,

    #[error("point is not on the theta divisor (|theta| = {modulus:e})")]
    NotOnDivisor { modulus: f64 },

    #[error("all first partials of theta vanish: singular point of the divisor")]
    SingularDivisorPoint,

    #[error("input points are rank deficient: {0}")]
    RankDeficientInput(String),
}

impl Error {
    /// Variant name, as reported in machine-readable error objects.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NonPositiveDefinite { .. } => "NonPositiveDefinite",
            Error::ToleranceTooTight { .. } => "ToleranceTooTight",
            Error::ToleranceUnreachable { .. } => "ToleranceUnreachable",
            Error::InvalidMultiIndex(_) => "InvalidMultiIndex",
            Error::DivisorHit { .. } => "DivisorHit",
            Error::NotUnimodular { .. } => "NotUnimodular",
            Error::InvalidSplit { .. } => "InvalidSplit",
            Error::NotReal => "NotReal",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DegenerateSample => "DegenerateSample",
            Error::TooFewSamples => "TooFewSamples",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::IndeterminatePoint => "IndeterminatePoint",
            Error::NoZeroFound => "NoZeroFound",
            Error::NotOnDivisor { .. } => "NotOnDivisor",
            Error::SingularDivisorPoint => "SingularDivisorPoint",
            Error::RankDeficientInput(_) => "RankDeficientInput",
        }
    }

    /// Whether the error reflects bad input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidDimension(_)
                | Error::NotSymmetric { .. }
                | Error::NonPositiveDefinite { .. }
                | Error::ToleranceTooTight { .. }
                | Error::InvalidMultiIndex(_)
                | Error::NotUnimodular { .. }
                | Error::InvalidSplit { .. }
                | Error::NotReal
                | Error::NotPositiveDefinite
                | Error::DegenerateSample
                | Error::InvalidArgument(_)
                | Error::RankDeficientInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
