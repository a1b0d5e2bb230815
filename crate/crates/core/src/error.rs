use serde::Serialize;
use thiserror::Error;

/// Errors raised by evaluation, zero location and verification routines.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument z must be nonzero")]
    ZeroArgument,

    #[error("series budget exceeded: geometric tail regime not reached within {terms} terms")]
    BudgetExceeded { terms: usize },

    #[error("non-finite value produced while evaluating {0}")]
    NonFinite(&'static str),

    #[error("zero too close to the contour |z| = {radius:e} (min scaled modulus {min_modulus:e})")]
    ContourTooClose { radius: f64, min_modulus: f64 },

    #[error(
        "Newton iteration did not converge after {iterations} iterations \
         (scaled residual {residual:e}{})",
        .at_modulus.map(|r| format!(", |q| = {r}")).unwrap_or_default()
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        at_modulus: Option<f64>,
    },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, ThetaError>;
