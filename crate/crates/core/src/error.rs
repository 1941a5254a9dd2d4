use serde::Serialize;
use thiserror::Error;

/// The shifted error of one channel left the prescribed set: `|psi| >= 1 - GUARD`.
///
/// This is the transform singularity. It is reported, never clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Error)]
#[error("performance violation on channel {channel} at t = {t}: z = {z}, h = {h}, psi = {psi}")]
pub struct PerformanceViolation {
    /// 1-based channel index.
    pub channel: usize,
    pub t: f64,
    pub z: f64,
    pub h: f64,
    pub psi: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid scenario field `{field}`: {reason}")]
    InvalidScenario { field: String, reason: String },

    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Violation(#[from] PerformanceViolation),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn scenario(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidScenario {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
