use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("valence mismatch: {left} vs {right}")]
    ValenceMismatch { left: u32, right: u32 },

    #[error("weights sum to {sum}, expected 1")]
    Normalization { sum: f64 },

    #[error("degenerate class: ell*(ell - 2 - sigma) = {bound} is not positive")]
    Degenerate { bound: f64 },

    #[error("denominator of the analytic ratio vanishes at z = {z}")]
    Singular { z: Complex64 },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidParams(_) => "invalid_params",
            Error::ValenceMismatch { .. } => "valence_mismatch",
            Error::Normalization { .. } => "normalization",
            Error::Degenerate { .. } => "degenerate",
            Error::Singular { .. } => "singular",
            Error::Quadrature { .. } => "quadrature",
            Error::Json(_) => "json",
        }
    }
}
