use thiserror::Error;

/// Errors raised by the model.
///
/// `InvalidInput` is for parameters rejected before any computation starts.
/// Everything else is a numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("propagator did not decay below tolerance by t = {horizon} (|phi| = {residual:.3e})")]
    PropagatorNotDecayed { horizon: f64, residual: f64 },

    #[error("photon spectral weight vanishes at {omega} eV; renormalization undefined")]
    VanishingSpectralWeight { omega: f64 },

    #[error("steady state is not unique (second smallest singular value {sigma:.3e})")]
    DegenerateSteadyState { sigma: f64 },

    #[error("steady state has negative population {value:.3e} at index {index}")]
    NegativePopulation { index: usize, value: f64 },

    #[error("series failed to converge after {terms} terms")]
    SeriesNotConverged { terms: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors that stem from bad inputs rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be non-negative, got {value}")))
    }
}
