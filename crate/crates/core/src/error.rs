//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Finite and strictly positive, or a named [`Error::InvalidParameter`].
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint: "must be finite and > 0",
        })
    }
}

/// Finite and non-negative, or a named [`Error::InvalidParameter`].
pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint: "must be finite and >= 0",
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Pre- and post-selection are (numerically) orthogonal: the survival
    /// probability is below the degeneracy threshold and no weak value
    /// exists.
    #[error("degenerate post-selection: survival probability {p:.3e} is below {threshold:.0e}")]
    DegeneratePostselection { p: f64, threshold: f64 },

    /// A constructor argument violates a type invariant.
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A two-component state failed the unit-norm check.
    #[error("state is not normalized: |h|^2 + |v|^2 = {norm_sqr} (tolerance {tolerance})")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },

    /// A 2x2 observable failed the Hermiticity check.
    #[error("observable is not Hermitian within {tolerance}")]
    NotHermitian { tolerance: f64 },

    /// The wavelength grid does not cover the span a fit-safe synthesis
    /// needs.
    #[error("grid [{grid_min_nm}, {grid_max_nm}] nm is narrower than the required [{required_min_nm}, {required_max_nm}] nm")]
    GridTooNarrow {
        grid_min_nm: f64,
        grid_max_nm: f64,
        required_min_nm: f64,
        required_max_nm: f64,
    },

    /// The first-order spectral tilt is too steep for the shifted-Gaussian
    /// model to hold.
    #[error("spectral tilt |{tilt}| exceeds the small-shift limit {limit}")]
    ShiftRegimeExceeded { tilt: f64, limit: f64 },

    /// The spectrum cannot support a Gaussian center fit.
    #[error("degenerate fit: {reason}")]
    FitDegenerate { reason: &'static str },

    /// The input grid is coarser than the spectrometer resolution, so
    /// binning would have to invent information.
    #[error(
        "grid step {step_nm} nm is coarser than the spectrometer resolution {resolution_nm} nm"
    )]
    GridCoarserThanResolution { step_nm: f64, resolution_nm: f64 },

    /// Too many sweep points fall outside the small-signal regime to fit a
    /// sensitivity slope for this post-selection angle.
    #[error("regime violation at beta = {beta_rad} rad: {usable} usable point(s) after excluding {} out-of-regime pair(s); at least 3 required", excluded.len())]
    RegimeViolation {
        beta_rad: f64,
        usable: usize,
        /// Offending (beta_rad, velocity_mps) pairs.
        excluded: Vec<(f64, f64)>,
    },

    /// Filesystem or stream failure while writing an output artifact.
    #[error("i/o failure on {path}: {message}")]
    Io { path: String, message: String },
}
