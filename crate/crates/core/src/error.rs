use thiserror::Error;

use crate::boundary::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("matrix is singular (smallest singular value {smallest_singular_value:.3e})")]
    Singular { smallest_singular_value: f64 },

    #[error("matrix is not unitary (residual ‖U†U − I‖_F = {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(ValidationReport),

    #[error("energy must be a positive finite number, got {0}")]
    InvalidEnergy(f64),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("resonance: |1 − S_ii U_11| = {denominator:.3e} is below the guard")]
    Resonance { denominator: f64 },

    #[error("reflection amplitude |S_ii| = {magnitude:.3e} on channel {channel} is too small; use the zero-reflection fallback")]
    ZeroReflection { channel: usize, magnitude: f64 },

    #[error("channel {channel} is decoupled (|S_ii| = 1); its reflection phase is invisible to magnitude measurements")]
    UnobservablePhase { channel: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::Shape {
            expected: expected.into(),
            found: found.into(),
        }
    }
}

pub(crate) fn check_energy(energy: f64) -> Result<()> {
    if energy.is_finite() && energy > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEnergy(energy))
    }
}
