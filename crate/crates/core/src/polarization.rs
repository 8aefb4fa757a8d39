//! Pre/post-selection states and the weak value on the {H, V} basis.
//!
//! The interferometer sends horizontal polarization clockwise and vertical
//! polarization counter-clockwise around the fiber loop, so the moving arm
//! imprints a phase `+phi` on |H> and `-phi` on |V>. Pre-selection is fixed
//! circular light (linear polarizer at pi/4 followed by a quarter-wave
//! plate); post-selection is offset from orthogonality by a small angle
//! `beta` and carries the accumulated phase:
//!
//! ```text
//! |pre>  = sin(pi/4) |H> + i cos(pi/4) |V>
//! |post> = i sin(pi/4 + beta) e^{+i phi} |H> + cos(pi/4 + beta) e^{-i phi} |V>
//! ```
//!
//! The measured quantity is the weak value of the half-difference observable
//! `A = (|H><H| - |V><V|) / 2`. Its closed form on this pre/post pair is
//!
//! ```text
//! A_w = [sin(phi) sin(beta) + i cos(phi) cos(beta)]
//!     / [sin(phi) cos(beta) + i sin(beta) cos(phi)]
//! ```
//!
//! whose imaginary part drives the spectral shift, and the survival
//! probability of post-selection is
//!
//! ```text
//! p = sin^2(phi) cos^2(beta) + sin^2(beta) cos^2(phi).
//! ```
//!
//! [`weak_value_closed_form`] is the canonical route used by everything
//! downstream. [`weak_value_raw`] evaluates `<post|A|pre> / <post|pre>`
//! directly from amplitudes as an independent cross-check; on this pre/post
//! pair it equals exactly half the closed form (the closed form is
//! normalized to the full H/V phase split, while `A` carries eigenvalues
//! +-1/2). The constant is measured, not folded in.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

/// Fixed angle of the pre-selection polarizer, radians.
pub const PRESELECTION_ANGLE_RAD: f64 = FRAC_PI_4;

/// Survival probabilities below this are treated as exactly orthogonal
/// selection: no physically meaningful photon budget reaches the detector.
pub const DEGENERACY_THRESHOLD: f64 = 1e-30;

const NORM_TOLERANCE: f64 = 1e-12;
const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// A pure polarization state `h |H> + v |V>`, kept normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationState {
    h: Complex64,
    v: Complex64,
}

impl PolarizationState {
    /// Builds a state from amplitudes, requiring unit norm within 1e-12.
    pub fn new(h: Complex64, v: Complex64) -> Result<Self> {
        let norm_sqr = h.norm_sqr() + v.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm_sqr,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self { h, v })
    }

    /// Builds a state from arbitrary amplitudes, rescaling to unit norm.
    pub fn normalized(h: Complex64, v: Complex64) -> Result<Self> {
        let norm_sqr = h.norm_sqr() + v.norm_sqr();
        if norm_sqr < 1e-300 {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                value: norm_sqr,
                constraint: "cannot normalize the zero vector",
            });
        }
        let inv = norm_sqr.sqrt().recip();
        Ok(Self {
            h: h * inv,
            v: v * inv,
        })
    }

    /// |H>, the clockwise-circulating component.
    pub fn horizontal() -> Self {
        Self {
            h: Complex64::new(1.0, 0.0),
            v: Complex64::new(0.0, 0.0),
        }
    }

    /// |V>, the counter-clockwise-circulating component.
    pub fn vertical() -> Self {
        Self {
            h: Complex64::new(0.0, 0.0),
            v: Complex64::new(1.0, 0.0),
        }
    }

    pub fn h(&self) -> Complex64 {
        self.h
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    /// Inner product `<self|rhs>`.
    pub fn inner(&self, rhs: &Self) -> Complex64 {
        self.h.conj() * rhs.h + self.v.conj() * rhs.v
    }

    /// (|h|^2, |v|^2): how the intensity splits across the two paths.
    pub fn intensity_split(&self) -> (f64, f64) {
        (self.h.norm_sqr(), self.v.norm_sqr())
    }
}

/// A 2x2 Hermitian observable on the {H, V} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable2 {
    entries: [[Complex64; 2]; 2],
}

impl Observable2 {
    /// Builds an observable, requiring Hermiticity within 1e-12.
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm_defect = (entries[0][0] - entries[0][0].conj()).norm()
            + (entries[1][1] - entries[1][1].conj()).norm()
            + (entries[0][1] - entries[1][0].conj()).norm();
        if herm_defect > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                tolerance: HERMITICITY_TOLERANCE,
            });
        }
        Ok(Self { entries })
    }

    /// The canonical path observable `(|H><H| - |V><V|) / 2`.
    pub fn canonical() -> Self {
        Self {
            entries: [
                [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)],
            ],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    /// Applies the observable to a state, returning raw (h, v) amplitudes.
    pub fn apply(&self, s: &PolarizationState) -> (Complex64, Complex64) {
        (
            self.entries[0][0] * s.h + self.entries[0][1] * s.v,
            self.entries[1][0] * s.h + self.entries[1][1] * s.v,
        )
    }
}

/// Weak value of the path observable plus the post-selection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    /// Complex weak value (closed form).
    pub a_w: Complex64,
    /// Imaginary part, evaluated from its own closed form.
    pub im_a_w: f64,
    /// Probability that a photon survives post-selection, in [0, 1].
    pub p_postselect: f64,
}

/// The fixed circular pre-selection state.
pub fn preselect() -> PolarizationState {
    let (sin, cos) = PRESELECTION_ANGLE_RAD.sin_cos();
    PolarizationState {
        h: Complex64::new(sin, 0.0),
        v: Complex64::new(0.0, cos),
    }
}

/// The post-selection state for offset angle `beta` and accumulated
/// interferometric phase `phi` (both radians, both finite).
pub fn postselect(beta_rad: f64, phi_rad: f64) -> PolarizationState {
    assert!(
        beta_rad.is_finite() && phi_rad.is_finite(),
        "post-selection angles must be finite"
    );
    let (sin, cos) = (PRESELECTION_ANGLE_RAD + beta_rad).sin_cos();
    let phase = Complex64::from_polar(1.0, phi_rad);
    PolarizationState {
        h: Complex64::new(0.0, sin) * phase,
        v: Complex64::new(cos, 0.0) * phase.conj(),
    }
}

/// Post-selection survival probability `sin^2(phi) cos^2(beta) +
/// sin^2(beta) cos^2(phi)`.
pub fn postselection_probability(beta_rad: f64, phi_rad: f64) -> f64 {
    let (sb, cb) = beta_rad.sin_cos();
    let (sp, cp) = phi_rad.sin_cos();
    sp * sp * cb * cb + sb * sb * cp * cp
}

/// Closed-form weak value for the canonical pre/post pair.
///
/// Fails with [`Error::DegeneratePostselection`] when the survival
/// probability is below [`DEGENERACY_THRESHOLD`] (exactly orthogonal
/// selection, e.g. `beta = phi = 0`).
pub fn weak_value_closed_form(beta_rad: f64, phi_rad: f64) -> Result<WeakValueResult> {
    let p = postselection_probability(beta_rad, phi_rad);
    if p < DEGENERACY_THRESHOLD {
        return Err(Error::DegeneratePostselection {
            p,
            threshold: DEGENERACY_THRESHOLD,
        });
    }
    let (sb, cb) = beta_rad.sin_cos();
    let (sp, cp) = phi_rad.sin_cos();
    let numerator = Complex64::new(sp * sb, cp * cb);
    let denominator = Complex64::new(sp * cb, sb * cp);
    let a_w = numerator / denominator;
    // Imaginary part from its own closed form; the denominator equals p.
    let im_a_w = sp * cp * (cb * cb - sb * sb) / p;
    Ok(WeakValueResult {
        a_w,
        im_a_w,
        p_postselect: p,
    })
}

/// Weak value `<post|obs|pre> / <post|pre>` computed directly from state
/// amplitudes and the observable matrix.
///
/// Fails with [`Error::DegeneratePostselection`] when `|<post|pre>|^2` is
/// below [`DEGENERACY_THRESHOLD`].
pub fn weak_value_raw(
    pre: &PolarizationState,
    post: &PolarizationState,
    obs: &Observable2,
) -> Result<Complex64> {
    let overlap = post.inner(pre);
    if overlap.norm_sqr() < DEGENERACY_THRESHOLD {
        return Err(Error::DegeneratePostselection {
            p: overlap.norm_sqr(),
            threshold: DEGENERACY_THRESHOLD,
        });
    }
    let (ah, av) = obs.apply(pre);
    let numerator = post.h.conj() * ah + post.v.conj() * av;
    Ok(numerator / overlap)
}
