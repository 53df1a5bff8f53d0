//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors reported by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or rule was called with parameters outside its domain.
    InvalidParameter(String),
    /// An operation received fields on different grids or representations.
    GridMismatch(String),
    /// A field contained NaN or infinite samples.
    NonFinite(String),
    /// Requested data family is not registered.
    UnknownFamily(String),
    /// The weakly singular data spec violates the `H^2` admissibility rule
    /// `beta0 - 2 - 2*alpha0 > -3/2`.
    NotSquareAdmissible { alpha0: f64, beta0: f64 },
    /// Picard increments failed to contract (ratio >= 1 for three
    /// consecutive iterations); carries the observed ratios.
    NonContraction(Vec<f64>),
    /// Explicit time step violates the advective/diffusive CFL limit.
    CflViolation { dt: f64, dt_max: f64 },
    /// Auto-controlled comparison norm exceeded its admissible bound.
    EnvelopeViolation { window: usize, norm: f64, bound: f64 },
    /// A sample region or pair budget was empty.
    EmptySampleSet(String),
    /// The field does not carry enough resolved derivatives for the request.
    SmoothnessBudget { requested: usize, available: usize },
    /// Axis index outside `0..D`.
    AxisOutOfRange { axis: usize, dim: usize },
    /// Operation requires a different spatial dimension.
    DimensionUnsupported { dim: usize, needed: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::GridMismatch(msg) => write!(f, "grid mismatch: {msg}"),
            Error::NonFinite(msg) => write!(f, "non-finite values: {msg}"),
            Error::UnknownFamily(name) => write!(f, "unknown data family: {name}"),
            Error::NotSquareAdmissible { alpha0, beta0 } => write!(
                f,
                "singular data rejected: beta0 - 2 - 2*alpha0 = {} is not > -3/2 \
                 (alpha0={alpha0}, beta0={beta0})",
                beta0 - 2.0 - 2.0 * alpha0
            ),
            Error::NonContraction(ratios) => {
                write!(f, "Picard iteration failed to contract; ratios: {ratios:?}")
            }
            Error::CflViolation { dt, dt_max } => {
                write!(f, "CFL violation: dt={dt} exceeds stable limit {dt_max}")
            }
            Error::EnvelopeViolation { window, norm, bound } => write!(
                f,
                "auto-control envelope violated in window {window}: norm {norm} > bound {bound}"
            ),
            Error::EmptySampleSet(msg) => write!(f, "empty sample set: {msg}"),
            Error::SmoothnessBudget { requested, available } => write!(
                f,
                "smoothness budget exceeded: requested {requested} derivatives, resolved {available}"
            ),
            Error::AxisOutOfRange { axis, dim } => {
                write!(f, "axis {axis} out of range for dimension {dim}")
            }
            Error::DimensionUnsupported { dim, needed } => {
                write!(f, "dimension {dim} unsupported: requires {needed}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
