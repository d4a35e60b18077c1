use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("eccentricity {0} outside [0, 1)")]
    EccentricityDomain(f64),

    #[error("no librational confinement: kappa_x == kappa_y (spherical particle)")]
    NoConfinement,

    #[error("n = {n} is not a steady-state occupation (relative residual {residual:e})")]
    NotARoot { n: f64, residual: f64 },

    #[error("turning points do not exist: window closed (delta = {delta}, gamma_b = {gamma_b})")]
    WindowClosed { delta: f64, gamma_b: f64 },

    #[error("empty drive grid")]
    EmptyGrid,

    #[error("drive grid is not monotone at index {0}")]
    NonMonotoneGrid(usize),

    #[error("integration failed at t = {t:e}: step size underflow (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
