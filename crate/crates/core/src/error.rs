use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("degenerate spectrum: {0}")]
    Degeneracy(String),

    #[error("exceptional point |m| = |gamma| (m = {m}, gamma = {gamma})")]
    ExceptionalPoint { m: f64, gamma: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("quadrature failed to reach tolerance: estimated error {estimate:e}")]
    QuadratureFailure { estimate: f64 },

    #[error("total intensity is zero")]
    ZeroIntensity,

    #[error("beam reached the array boundary: edge/peak ratio {ratio:e} at z = {z}")]
    BoundaryContamination { z: f64, ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {x}")))
    }
}
