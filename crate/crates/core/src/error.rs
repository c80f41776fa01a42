//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A spec or parameter failed validation; names the offending field.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// Frequency outside the signal branch of the wavelength mapping.
    #[error("omega_over_c = {omega_over_c} is outside the signal branch (requires omega_over_c * lambda0 < pi)")]
    OutOfBranch { omega_over_c: f64 },

    /// Spectrum carries no signal (all densities zero or empty).
    #[error("spectrum has no usable signal: {0}")]
    DegenerateSpectrum(String),

    /// Requested evaluation path does not exist for this structure kind.
    #[error("method not available: {0}")]
    UnsupportedMethod(String),

    /// A requested tolerance or search range cannot be met.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }
}
