use thiserror::Error;

use crate::quadrature::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {re} + {im}i is not in the open upper half-plane")]
    OutsideHalfPlane { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("duplicate point s = {0} (Gram matrix would be singular)")]
    DuplicatePoint(f64),

    #[error("logarithm argument {re} + {im}i lies on the branch cut (-inf, 0]")]
    BranchCut { re: f64, im: f64 },

    #[error("function handle has no boundary evaluator")]
    MissingBoundary,

    #[error("decay envelope does not make the integrand integrable: {0}")]
    NonIntegrableEnvelope(String),

    #[error("quadrature did not converge (estimate {}, error estimate {:e})", .best.value, .best.error_estimate)]
    NotConverged { best: QuadratureResult },

    #[error("anchor {re} + {im}i is off the imaginary axis; closed forms are unavailable")]
    OffImaginaryAxis { re: f64, im: f64 },

    #[error("Gram matrix ill-conditioned (estimate {condition:e} > cap {cap:e}); closest pair s = {s_a}, {s_b}")]
    IllConditioned {
        condition: f64,
        cap: f64,
        s_a: f64,
        s_b: f64,
    },

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("zero function has no norm ratio")]
    ZeroFunction,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
