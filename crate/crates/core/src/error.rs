use thiserror::Error;

/// Errors raised by the lattice model, the integrator and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A state produced by the integrator contained NaN or an infinity.
    #[error("integration diverged at step {step}: non-finite state after t = {last_finite_time}")]
    Divergence { last_finite_time: f64, step: u64 },

    #[error("insufficient data: {usable} usable samples, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
