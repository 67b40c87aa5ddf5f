use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady state undefined without resonator damping (gamma_fb = 0)")]
    UndefinedSteadyState,

    #[error("integration diverged at step {step} (t = {time}): trace {trace}")]
    IntegrationDiverged { step: u64, time: f64, trace: f64 },

    #[error("series length mismatch: {0}")]
    SeriesLengthMismatch(String),

    #[error("record undefined: zero information rate (eta_tot * k_tot = 0)")]
    DegenerateRecord,

    #[error("{0} trajectories diverged out of {1}, above the 10% tolerance")]
    TooManyDivergences(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
