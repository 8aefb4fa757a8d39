//! Gaussian probe spectra, the post-selection tilt and center extraction.
//!
//! The probe enters as a Gaussian intensity profile
//! `G(lambda) = I0 exp(-(lambda - lambda0)^2 / W^2)` with width parameter
//! `W` equal to the source bandwidth. Post-selection multiplies it by the
//! survival probability and by an exponential tilt driven by the imaginary
//! part of the weak value. The tilt of a Gaussian is again a Gaussian of
//! identical width whose center moves by exactly
//!
//! ```text
//! delta_lambda0 = -(4 pi W^2 / lambda0) * Im A_w
//! ```
//!
//! so the analytic shift and a center fit of the synthesized spectrum are
//! two routes to the same number; the tests hold them against each other.
//!
//! The default tilt slope is `-8 pi Im A_w / lambda0` per nanometer, chosen
//! so the fitted center lands on the analytic shift above.
//! [`TiltConvention::MomentumLiteral`] keeps the momentum-domain factor
//! `exp(2 p g Im A_w)` with `p = 2 pi / lambda` and `g = lambda0`, which
//! linearizes to half that slope; it is exposed for comparison only and its
//! overall scale is not the survival probability.
//!
//! Wavelengths are nanometers throughout this module.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{ensure_positive, Error, Result};
use crate::exec;
use crate::polarization::WeakValueResult;

/// Default number of grid samples.
pub const DEFAULT_GRID_POINTS: usize = 4096;
/// Default grid half-span in units of the probe width.
pub const DEFAULT_GRID_HALF_SPAN_WIDTHS: f64 = 4.0;
/// Dimensionless tilt magnitude above which the first-order shifted-Gaussian
/// model is refused.
pub const TILT_REGIME_LIMIT: f64 = 0.5;

/// Source spectrum parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Central wavelength, nm.
    pub lambda0_nm: f64,
    /// Gaussian width parameter W (the 1/e intensity half-width), nm.
    pub width_nm: f64,
    /// Peak intensity, arbitrary units.
    pub peak_intensity: f64,
}

impl ProbeSpec {
    pub fn new(lambda0_nm: f64, width_nm: f64, peak_intensity: f64) -> Result<Self> {
        ensure_positive("lambda0_nm", lambda0_nm)?;
        ensure_positive("width_nm", width_nm)?;
        if width_nm >= lambda0_nm {
            return Err(Error::InvalidParameter {
                name: "width_nm",
                value: width_nm,
                constraint: "must be narrowband: width_nm < lambda0_nm",
            });
        }
        ensure_positive("peak_intensity", peak_intensity)?;
        Ok(Self {
            lambda0_nm,
            width_nm,
            peak_intensity,
        })
    }

    /// The default sampling grid: [`DEFAULT_GRID_POINTS`] samples spanning
    /// `lambda0 +- 4 W`.
    pub fn default_grid(&self) -> WavelengthGrid {
        self.grid(DEFAULT_GRID_POINTS, DEFAULT_GRID_HALF_SPAN_WIDTHS)
            .expect("a valid probe implies a valid default grid")
    }

    /// A grid with `points` samples spanning `lambda0 +- half_span_widths * W`.
    pub fn grid(&self, points: usize, half_span_widths: f64) -> Result<WavelengthGrid> {
        WavelengthGrid::linspace(self.lambda0_nm, half_span_widths * self.width_nm, points)
    }
}

/// A strictly increasing, uniformly spaced wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WavelengthGrid {
    values: Vec<f64>,
    step_nm: f64,
}

impl WavelengthGrid {
    pub fn linspace(center_nm: f64, half_span_nm: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: points as f64,
                constraint: "must be >= 2",
            });
        }
        ensure_positive("half_span_nm", half_span_nm)?;
        let step = 2.0 * half_span_nm / (points - 1) as f64;
        let start = center_nm - half_span_nm;
        let values = (0..points).map(|i| start + i as f64 * step).collect();
        Ok(Self {
            values,
            step_nm: step,
        })
    }

    /// Wraps raw sample positions; they must be strictly increasing and
    /// uniform within 1e-9 relative.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "values",
                value: values.len() as f64,
                constraint: "must have >= 2 samples",
            });
        }
        let step = (values[values.len() - 1] - values[0]) / (values.len() - 1) as f64;
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "values",
                value: step,
                constraint: "must be strictly increasing",
            });
        }
        for pair in values.windows(2) {
            let local = pair[1] - pair[0];
            if !local.is_finite() || local <= 0.0 || ((local - step) / step).abs() > 1e-9 {
                return Err(Error::InvalidParameter {
                    name: "values",
                    value: local,
                    constraint: "must be uniformly spaced within 1e-9 relative",
                });
            }
        }
        Ok(Self {
            values,
            step_nm: step,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step_nm(&self) -> f64 {
        self.step_nm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_nm(&self) -> f64 {
        self.values[0]
    }

    pub fn last_nm(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// A sampled intensity spectrum with its originating probe parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: WavelengthGrid,
    intensities: Vec<f64>,
    metadata: ProbeSpec,
}

impl Spectrum {
    pub fn new(grid: WavelengthGrid, intensities: Vec<f64>, metadata: ProbeSpec) -> Result<Self> {
        if intensities.len() != grid.len() {
            return Err(Error::InvalidParameter {
                name: "intensities",
                value: intensities.len() as f64,
                constraint: "length must match the wavelength grid",
            });
        }
        if let Some(&bad) = intensities.iter().find(|i| !i.is_finite() || **i < 0.0) {
            return Err(Error::InvalidParameter {
                name: "intensities",
                value: bad,
                constraint: "must be finite and >= 0",
            });
        }
        Ok(Self {
            grid,
            intensities,
            metadata,
        })
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        self.grid.values()
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn step_nm(&self) -> f64 {
        self.grid.step_nm()
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn metadata(&self) -> &ProbeSpec {
        &self.metadata
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    /// Index and value of the intensity maximum (first maximum on ties).
    pub fn peak(&self) -> (usize, f64) {
        let mut idx = 0;
        let mut best = self.intensities[0];
        for (i, &v) in self.intensities.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                idx = i;
            }
        }
        (idx, best)
    }

    /// Total power under the rectangle rule: step * sum of intensities.
    /// Consistent with the mass-preserving spectrometer binning.
    pub fn integrated_power(&self) -> f64 {
        self.step_nm() * self.intensities.iter().sum::<f64>()
    }

    /// Writes the CSV form: header `wavelength_nm,intensity`, one row per
    /// sample, plain decimal floats.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "wavelength_nm,intensity")?;
        for (wl, i) in self.grid.values().iter().zip(&self.intensities) {
            writeln!(out, "{wl},{i}")?;
        }
        Ok(())
    }
}

/// How a central-wavelength number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMethod {
    Analytic,
    GaussianFit,
    Centroid,
}

/// A central wavelength and its displacement from the probe center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftEstimate {
    /// Estimated center, nm.
    pub center_nm: f64,
    /// Center minus the probe's nominal `lambda0_nm`, nm.
    pub delta_lambda0_nm: f64,
    pub method: ShiftMethod,
    /// RMS relative residual of the estimator; 0 for analytic results.
    pub fit_residual: f64,
}

/// Which spectral tilt the post-selection applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltConvention {
    /// Linear-in-wavelength exponent with slope `-8 pi Im A_w / lambda0`;
    /// shifts the Gaussian center by exactly the analytic value. Default.
    WavelengthLinear,
    /// The momentum-domain factor `exp(2 p g Im A_w)` taken literally with
    /// `p = 2 pi / lambda`, `g = lambda0`. Linearizes to half the default
    /// slope; kept for comparison.
    MomentumLiteral,
}

/// Samples the Gaussian probe on `grid`.
///
/// The grid must span at least `lambda0 +- 4 W`, otherwise truncation would
/// bias every downstream fit.
pub fn initial_spectrum(spec: &ProbeSpec, grid: &WavelengthGrid) -> Result<Spectrum> {
    let required_min = spec.lambda0_nm - DEFAULT_GRID_HALF_SPAN_WIDTHS * spec.width_nm;
    let required_max = spec.lambda0_nm + DEFAULT_GRID_HALF_SPAN_WIDTHS * spec.width_nm;
    let slack = 1e-9 * spec.width_nm;
    if grid.first_nm() > required_min + slack || grid.last_nm() < required_max - slack {
        return Err(Error::GridTooNarrow {
            grid_min_nm: grid.first_nm(),
            grid_max_nm: grid.last_nm(),
            required_min_nm: required_min,
            required_max_nm: required_max,
        });
    }
    let (l0, w, i0) = (spec.lambda0_nm, spec.width_nm, spec.peak_intensity);
    let intensities = exec::map_collect(grid.values(), |&wl| {
        let d = (wl - l0) / w;
        i0 * (-d * d).exp()
    });
    Spectrum::new(grid.clone(), intensities, *spec)
}

/// The closed-form central-wavelength shift
/// `delta_lambda0 = -(4 pi W^2 / lambda0) * Im A_w`.
pub fn analytic_shift(spec: &ProbeSpec, im_a_w: f64) -> ShiftEstimate {
    let delta = -4.0 * PI * spec.width_nm * spec.width_nm * im_a_w / spec.lambda0_nm;
    ShiftEstimate {
        center_nm: spec.lambda0_nm + delta,
        delta_lambda0_nm: delta,
        method: ShiftMethod::Analytic,
        fit_residual: 0.0,
    }
}

/// Post-selected spectrum under the default wavelength-linear tilt.
pub fn postselected_spectrum(
    spec: &ProbeSpec,
    wv: &WeakValueResult,
    grid: &WavelengthGrid,
) -> Result<Spectrum> {
    postselected_spectrum_with(spec, wv, grid, TiltConvention::WavelengthLinear)
}

/// Post-selected spectrum with an explicit tilt convention.
///
/// Refuses tilts outside the small-shift regime
/// (`|8 pi Im A_w W / lambda0| > 0.5`), where the first-order
/// shifted-Gaussian picture no longer holds.
pub fn postselected_spectrum_with(
    spec: &ProbeSpec,
    wv: &WeakValueResult,
    grid: &WavelengthGrid,
    tilt: TiltConvention,
) -> Result<Spectrum> {
    let slope_per_nm = 8.0 * PI * wv.im_a_w / spec.lambda0_nm;
    let dimensionless_tilt = slope_per_nm * spec.width_nm;
    if dimensionless_tilt.abs() > TILT_REGIME_LIMIT {
        return Err(Error::ShiftRegimeExceeded {
            tilt: dimensionless_tilt,
            limit: TILT_REGIME_LIMIT,
        });
    }
    let base = initial_spectrum(spec, grid)?;
    let p = wv.p_postselect;
    let l0 = spec.lambda0_nm;
    let im = wv.im_a_w;
    let pairs: Vec<(f64, f64)> = grid
        .values()
        .iter()
        .copied()
        .zip(base.intensities().iter().copied())
        .collect();
    let intensities = match tilt {
        TiltConvention::WavelengthLinear => exec::map_collect(&pairs, |&(wl, base_i)| {
            p * (-slope_per_nm * (wl - l0)).exp() * base_i
        }),
        TiltConvention::MomentumLiteral => exec::map_collect(&pairs, |&(wl, base_i)| {
            p * (4.0 * PI * l0 * im / wl).exp() * base_i
        }),
    };
    Spectrum::new(grid.clone(), intensities, *spec)
}

/// A full Gaussian model fit `A exp(-(lambda - mu)^2 / w^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center_nm: f64,
    pub width_nm: f64,
    /// RMS residual over the fit window, relative to the peak intensity.
    pub rms_residual: f64,
}

/// Least-squares Gaussian center of a spectrum.
///
/// Seeds with a log-domain quadratic fit over the contiguous samples above
/// `peak / e^2`, then refines amplitude, center and width by damped
/// Gauss-Newton on the same window. Deterministic; no random restarts.
pub fn fit_center(s: &Spectrum) -> Result<ShiftEstimate> {
    let fit = fit_gaussian(s)?;
    Ok(ShiftEstimate {
        center_nm: fit.center_nm,
        delta_lambda0_nm: fit.center_nm - s.metadata().lambda0_nm,
        method: ShiftMethod::GaussianFit,
        fit_residual: fit.rms_residual,
    })
}

/// The full three-parameter Gaussian fit behind [`fit_center`].
#[allow(clippy::needless_range_loop)] // normal-equation assembly indexes two triangles at once
pub fn fit_gaussian(s: &Spectrum) -> Result<GaussianFit> {
    let n = s.len();
    if n < 16 {
        return Err(Error::FitDegenerate {
            reason: "fewer than 16 samples",
        });
    }
    // Intensities are validated finite and non-negative at construction,
    // so a zero peak means an all-zero spectrum.
    let (peak_idx, peak) = s.peak();
    if peak == 0.0 {
        return Err(Error::FitDegenerate {
            reason: "no positive intensity",
        });
    }
    if peak_idx == 0 || peak_idx == n - 1 {
        return Err(Error::FitDegenerate {
            reason: "peak touches the grid boundary",
        });
    }

    // Contiguous window above the 1/e^2 cut.
    let cut = peak * (-2.0f64).exp();
    let wl = s.wavelengths_nm();
    let iv = s.intensities();
    let mut lo = peak_idx;
    while lo > 0 && iv[lo - 1] > cut {
        lo -= 1;
    }
    let mut hi = peak_idx;
    while hi + 1 < n && iv[hi + 1] > cut {
        hi += 1;
    }
    if hi - lo + 1 < 3 {
        return Err(Error::FitDegenerate {
            reason: "fewer than 3 samples above the 1/e^2 cut",
        });
    }

    // Log-domain quadratic seed, centered on the peak sample for
    // conditioning: ln I = q0 + q1 x + q2 x^2 with x = lambda - lambda_peak.
    let x0 = wl[peak_idx];
    let mut s_x = [0.0f64; 5];
    let mut s_yx = [0.0f64; 3];
    for i in lo..=hi {
        let x = wl[i] - x0;
        let y = iv[i].ln();
        let mut xk = 1.0;
        for (k, acc) in s_x.iter_mut().enumerate() {
            *acc += xk;
            if k < 3 {
                s_yx[k] += y * xk;
            }
            xk *= x;
        }
    }
    let q = solve3(
        [
            [s_x[0], s_x[1], s_x[2]],
            [s_x[1], s_x[2], s_x[3]],
            [s_x[2], s_x[3], s_x[4]],
        ],
        s_yx,
    )
    .ok_or(Error::FitDegenerate {
        reason: "singular seed system",
    })?;
    if !q[2].is_finite() || q[2] >= 0.0 {
        return Err(Error::FitDegenerate {
            reason: "seed curvature is not concave",
        });
    }
    let mut mu = x0 - q[1] / (2.0 * q[2]);
    let mut w = (-1.0 / q[2]).sqrt();
    let mut a = (q[0] - q[1] * q[1] / (4.0 * q[2])).exp();

    // Damped Gauss-Newton refinement on the fit window.
    let window: Vec<(f64, f64)> = (lo..=hi).map(|i| (wl[i], iv[i])).collect();
    let sse = |a: f64, mu: f64, w: f64| -> f64 {
        window
            .iter()
            .map(|&(x, y)| {
                let d = (x - mu) / w;
                let r = a * (-d * d).exp() - y;
                r * r
            })
            .sum()
    };
    let mut current = sse(a, mu, w);
    let mut damping = 1e-8;
    for _ in 0..100 {
        // Normal equations for parameters (a, mu, w).
        let mut ata = [[0.0f64; 3]; 3];
        let mut atr = [0.0f64; 3];
        for &(x, y) in &window {
            let d = (x - mu) / w;
            let e = (-d * d).exp();
            let f = a * e;
            let j = [e, f * 2.0 * d / w, f * 2.0 * d * d / w];
            let r = f - y;
            for p in 0..3 {
                atr[p] += j[p] * r;
                for q2 in p..3 {
                    ata[p][q2] += j[p] * j[q2];
                }
            }
        }
        for p in 0..3 {
            for q2 in 0..p {
                ata[p][q2] = ata[q2][p];
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut lhs = ata;
            for (p, row) in lhs.iter_mut().enumerate() {
                row[p] += damping * ata[p][p].max(1e-300);
            }
            let Some(step) = solve3(lhs, [-atr[0], -atr[1], -atr[2]]) else {
                damping *= 10.0;
                continue;
            };
            let (na, nmu, nw) = (a + step[0], mu + step[1], w + step[2]);
            if !(nw.is_finite() && nw > 0.0 && na.is_finite() && na > 0.0) {
                damping *= 10.0;
                continue;
            }
            let trial = sse(na, nmu, nw);
            if trial <= current {
                let converged = step[1].abs() <= 1e-13 * w
                    && step[2].abs() <= 1e-13 * w
                    && step[0].abs() <= 1e-13 * a.abs();
                a = na;
                mu = nmu;
                w = nw;
                current = trial;
                damping = (damping / 3.0).max(1e-14);
                improved = true;
                if converged {
                    let rms = (current / window.len() as f64).sqrt() / peak;
                    return Ok(GaussianFit {
                        amplitude: a,
                        center_nm: mu,
                        width_nm: w,
                        rms_residual: rms,
                    });
                }
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let rms = (current / window.len() as f64).sqrt() / peak;
    Ok(GaussianFit {
        amplitude: a,
        center_nm: mu,
        width_nm: w,
        rms_residual: rms,
    })
}

/// Power-weighted mean wavelength.
pub fn centroid(s: &Spectrum) -> Result<ShiftEstimate> {
    let total: f64 = s.intensities().iter().sum();
    if total == 0.0 {
        return Err(Error::FitDegenerate {
            reason: "no positive intensity",
        });
    }
    let weighted: f64 = s
        .wavelengths_nm()
        .iter()
        .zip(s.intensities())
        .map(|(wl, i)| wl * i)
        .sum();
    let center = weighted / total;
    Ok(ShiftEstimate {
        center_nm: center,
        delta_lambda0_nm: center - s.metadata().lambda0_nm,
        method: ShiftMethod::Centroid,
        fit_residual: 0.0,
    })
}

/// Convolves the spectrum with a symmetric Gaussian kernel of standard
/// deviation `broadening_nm`. A Gaussian input of width parameter `W` comes
/// out with width `sqrt(W^2 + 2 b^2)` and an unmoved center.
pub fn apply_symmetric_dispersion(s: &Spectrum, broadening_nm: f64) -> Spectrum {
    assert!(
        broadening_nm >= 0.0 && broadening_nm.is_finite(),
        "broadening must be finite and >= 0"
    );
    if broadening_nm == 0.0 {
        return s.clone();
    }
    let step = s.step_nm();
    let radius = ((6.0 * broadening_nm / step).ceil() as usize).max(1);
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    let mut total = 0.0;
    for j in -(radius as isize)..=(radius as isize) {
        let x = j as f64 * step / broadening_nm;
        let k = (-0.5 * x * x).exp();
        kernel.push(k);
        total += k;
    }
    for k in &mut kernel {
        *k /= total;
    }
    let n = s.len();
    let iv = s.intensities();
    let indices: Vec<usize> = (0..n).collect();
    let out = exec::map_collect(&indices, |&i| {
        let mut acc = 0.0;
        for (kj, &k) in kernel.iter().enumerate() {
            let offset = kj as isize - radius as isize;
            let src = i as isize - offset;
            if src >= 0 && (src as usize) < n {
                acc += k * iv[src as usize];
            }
        }
        acc
    });
    Spectrum::new(s.grid().clone(), out, *s.metadata())
        .expect("convolution of a valid spectrum stays valid")
}

#[allow(clippy::needless_range_loop)] // index arithmetic is the clearest form of the elimination
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in col + 1..3 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}
