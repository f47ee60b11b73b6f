use thiserror::Error;

/// Errors raised by the integrators, solvers and functionals.
///
/// Payloads are stored as `f64` regardless of the scalar type used by the
/// computation so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("step failure at t = {t:e}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("tau is not yet increasing at t = {t:e} (taudot = {taudot:e})")]
    NotYetMonotone { t: f64, taudot: f64 },

    #[error("time {t:e} outside trajectory range [0, {t_max:e}]")]
    OutOfRange { t: f64, t_max: f64 },

    #[error("adaptive quadrature did not converge on [{a:e}, {b:e}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("time step {ds:e} exceeds the explicit diffusion bound {limit:e}")]
    StabilityViolation { ds: f64, limit: f64 },

    #[error("negative density {value:e} in cell {cell} at t = {t:e}")]
    NegativeDensity { cell: usize, value: f64, t: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
