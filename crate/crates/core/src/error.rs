//! Error types shared across the crate, with process exit codes for the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or malformed config/CLI input.
    #[error("configuration error: {0}")]
    Config(String),

    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The discrete spectrum cannot supply the requested bound states.
    #[error("spectrum error: {0}")]
    Spectrum(String),

    /// Numerical stability failure (NaN, norm drift) during propagation.
    #[error("numerical stability error: {0}")]
    Stability(String),

    /// Adiabatic state tracking could not resolve which state is which.
    #[error("continuity error: {0}")]
    Continuity(String),

    /// A projected dressed state lost almost all of its norm.
    #[error("degeneracy error: dressed state {state} depleted at t = {t} (residual norm {norm:.3e})")]
    Degenerate { state: usize, t: f64, norm: f64 },

    /// |a_n(t')| fell below the amplitude floor inside the probe window.
    #[error("depletion singularity: |a_{state}(t')| = {amp:.3e} < floor {floor:.1e} at t' = {t}")]
    DepletionSingularity {
        state: usize,
        t: f64,
        amp: f64,
        floor: f64,
    },

    /// Sample instants of two time series do not line up.
    #[error("sampling mismatch: {0}")]
    SamplingMismatch(String),

    /// RK4 integration accuracy failure (orthonormality drift).
    #[error("integration accuracy error: {0}")]
    IntegrationAccuracy(String),

    #[error("unsupported unit conversion: {0}")]
    UnsupportedUnits(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 2 config, 3 stability, 4 depletion singularity, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::UnsupportedUnits(_) => 2,
            Error::Stability(_) | Error::IntegrationAccuracy(_) => 3,
            Error::DepletionSingularity { .. } => 4,
            _ => 1,
        }
    }
}
