use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// kappa >= 1 leaves the region where the single-mode model is defined.
    #[error("kappa = {0} is outside the model's validity range [0, 1)")]
    OutsideValidity(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("eigenvalue iteration did not converge")]
    NonConvergence,

    /// Eigenvalue pattern matches none of Stable / RegionI / RegionII.
    #[error("spectrum does not match any regime shape at tol = {tol:e}: {omegas}")]
    UnclassifiableSpectrum { tol: f64, omegas: String },

    /// Two routes that must agree did not.
    #[error("internal inconsistency in {what}: residual {residual:e} exceeds {tol:e}")]
    Inconsistency {
        what: String,
        residual: f64,
        tol: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 for internal inconsistencies, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam { .. } | Error::OutsideValidity(_) | Error::Config(_) => 2,
            Error::Json(_) => 2,
            _ => 1,
        }
    }
}
