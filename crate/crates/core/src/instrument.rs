//! Hard limits of the measurement chain: spectrometer resolution, detector
//! floor and saturation, plus the classical intensity-readout baseline.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::sagnac::SagnacConfig;
use crate::spectrum::{ProbeSpec, Spectrum, WavelengthGrid};

/// Spectrometer acquisition model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrometerModel {
    /// Minimum resolvable wavelength step, nm.
    pub resolution_nm: f64,
    /// Per-bin intensity below which the detector reads zero.
    pub intensity_floor: f64,
    /// Per-bin clipping level, if the detector saturates.
    pub saturation: Option<f64>,
}

impl SpectrometerModel {
    pub fn new(resolution_nm: f64, intensity_floor: f64, saturation: Option<f64>) -> Result<Self> {
        ensure_positive("resolution_nm", resolution_nm)?;
        ensure_non_negative("intensity_floor", intensity_floor)?;
        if let Some(sat) = saturation {
            if !sat.is_finite() || sat <= intensity_floor {
                return Err(Error::InvalidParameter {
                    name: "saturation",
                    value: sat,
                    constraint: "must exceed the intensity floor",
                });
            }
        }
        Ok(Self {
            resolution_nm,
            intensity_floor,
            saturation,
        })
    }
}

impl Default for SpectrometerModel {
    /// A typical grating spectrometer: 0.02 nm resolution, ideal detector.
    fn default() -> Self {
        Self {
            resolution_nm: 0.02,
            intensity_floor: 0.0,
            saturation: None,
        }
    }
}

/// Classical fringe-intensity readout parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReadout {
    /// Fringe amplitude A in `I = A (1 + cos phi)`.
    pub amplitude: f64,
    /// Smallest resolvable phase, rad.
    pub phase_resolution_rad: f64,
}

impl ClassicalReadout {
    pub fn new(amplitude: f64, phase_resolution_rad: f64) -> Result<Self> {
        ensure_positive("amplitude", amplitude)?;
        ensure_positive("phase_resolution_rad", phase_resolution_rad)?;
        Ok(Self {
            amplitude,
            phase_resolution_rad,
        })
    }
}

/// Integrates a finely sampled spectrum into contiguous bins of width
/// `resolution_nm`, then applies the detector floor and saturation per bin.
///
/// Each input sample owns a cell of one grid step centered on it; cell mass
/// is split fractionally between the bins the cell overlaps, so total power
/// is conserved before the floor/saturation stage regardless of the
/// step-to-resolution ratio, and a bin width equal to the grid step
/// reproduces the input.
pub fn bin_spectrum(s: &Spectrum, m: &SpectrometerModel) -> Result<Spectrum> {
    let step = s.step_nm();
    let res = m.resolution_nm;
    if step > res * (1.0 + 1e-9) {
        return Err(Error::GridCoarserThanResolution {
            step_nm: step,
            resolution_nm: res,
        });
    }
    let wl = s.wavelengths_nm();
    let start = wl[0] - step / 2.0;
    let span = s.len() as f64 * step;
    let nbins = (span / res - 1e-9).ceil().max(1.0) as usize;
    if nbins < 2 {
        return Err(Error::GridCoarserThanResolution {
            step_nm: step,
            resolution_nm: res,
        });
    }
    let ratio = step / res; // <= 1 + 1e-9: a cell spans at most two bins
    let mut mass = vec![0.0f64; nbins];
    for (i, &intensity) in s.intensities().iter().enumerate() {
        let cell_lo = i as f64 * ratio;
        let cell_hi = (i + 1) as f64 * ratio;
        let k_lo = (cell_lo.floor() as usize).min(nbins - 1);
        let k_hi = (cell_hi.floor() as usize).min(nbins - 1);
        if k_lo == k_hi {
            mass[k_lo] += intensity * step;
        } else {
            let boundary = k_hi as f64;
            let left = ((boundary - cell_lo) / ratio).clamp(0.0, 1.0);
            let right = ((cell_hi - boundary) / ratio).clamp(0.0, 1.0);
            mass[k_lo] += intensity * step * left;
            mass[k_hi] += intensity * step * right;
        }
    }
    let centers: Vec<f64> = (0..nbins).map(|k| start + (k as f64 + 0.5) * res).collect();
    let intensities: Vec<f64> = mass
        .iter()
        .map(|&m_k| {
            let mut v = m_k / res;
            if v < m.intensity_floor {
                v = 0.0;
            }
            if let Some(sat) = m.saturation {
                v = v.min(sat);
            }
            v
        })
        .collect();
    Spectrum::new(
        WavelengthGrid::from_values(centers)?,
        intensities,
        *s.metadata(),
    )
}

/// Smallest detectable velocity for sensitivity `k` (nm per m/s):
/// `resolution / k`.
pub fn detection_limit(k_nm_per_mps: f64, m: &SpectrometerModel) -> f64 {
    assert!(k_nm_per_mps > 0.0, "sensitivity must be > 0");
    m.resolution_nm / k_nm_per_mps
}

/// Smallest velocity the classical fringe readout resolves:
/// `v = phi_min c lambda0 / (4 pi NL)`.
pub fn classical_velocity_limit(cfg: &SagnacConfig, r: &ClassicalReadout) -> f64 {
    r.phase_resolution_rad * cfg.c_mps * cfg.lambda0_m / (4.0 * std::f64::consts::PI * cfg.nl_m)
}

/// Classical fringe intensity `A (1 + cos phi)`.
pub fn classical_intensity(amplitude: f64, phi_rad: f64) -> f64 {
    assert!(amplitude > 0.0, "amplitude must be > 0");
    amplitude * (1.0 + phi_rad.cos())
}

/// Adds zero-mean Gaussian noise of standard deviation `sigma` to every
/// sample, clamping at zero. For robustness experiments only; the caller
/// supplies the uniform [0, 1) source, so a seeded generator keeps runs
/// reproducible.
pub fn add_gaussian_noise(s: &Spectrum, sigma: f64, uniform: &mut impl FnMut() -> f64) -> Spectrum {
    assert!(sigma >= 0.0, "sigma must be >= 0");
    if sigma == 0.0 {
        return s.clone();
    }
    let noisy: Vec<f64> = s
        .intensities()
        .iter()
        .map(|&i| {
            // Box-Muller from two uniforms.
            let u1 = uniform().max(1e-300);
            let u2 = uniform();
            let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (i + sigma * g).max(0.0)
        })
        .collect();
    Spectrum::new(s.grid().clone(), noisy, *s.metadata())
        .expect("clamped noise keeps the spectrum valid")
}

/// Convenience: the probe grid refined until its step is below the
/// spectrometer resolution, for synthesis that will be binned.
pub fn binnable_grid(
    probe: &ProbeSpec,
    m: &SpectrometerModel,
    min_points: usize,
) -> WavelengthGrid {
    let span = 2.0 * crate::spectrum::DEFAULT_GRID_HALF_SPAN_WIDTHS * probe.width_nm;
    let needed = (span / (0.5 * m.resolution_nm)).ceil() as usize + 1;
    probe
        .grid(
            needed.max(min_points),
            crate::spectrum::DEFAULT_GRID_HALF_SPAN_WIDTHS,
        )
        .expect("a valid probe implies a valid grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::weak_value_closed_form;
    use crate::spectrum::{fit_center, initial_spectrum, postselected_spectrum, ProbeSpec};

    fn probe() -> ProbeSpec {
        ProbeSpec::new(840.0, 150.0, 1.0).unwrap()
    }

    #[test]
    fn binning_at_the_grid_step_is_identity() {
        let spec = probe();
        let grid = spec.default_grid();
        let s = initial_spectrum(&spec, &grid).unwrap();
        let m = SpectrometerModel::new(s.step_nm(), 0.0, None).unwrap();
        let binned = bin_spectrum(&s, &m).unwrap();
        assert_eq!(binned.len(), s.len());
        for (a, b) in s.intensities().iter().zip(binned.intensities()) {
            assert!((a - b).abs() <= 1e-12 * a.abs() + 1e-300);
        }
        for (a, b) in s.wavelengths_nm().iter().zip(binned.wavelengths_nm()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn flat_spectrum_bins_flat() {
        let spec = probe();
        let grid = spec.grid(4096, 4.0).unwrap();
        let s = Spectrum::new(grid, vec![0.75; 4096], spec).unwrap();
        let m = SpectrometerModel::new(8.0 * s.step_nm(), 0.0, None).unwrap();
        let binned = bin_spectrum(&s, &m).unwrap();
        for &v in &binned.intensities()[..binned.len() - 1] {
            assert!((v - 0.75).abs() < 1e-12, "bin value {v}");
        }
    }

    #[test]
    fn binning_conserves_power() {
        let spec = probe();
        let grid = spec.grid(32768, 4.0).unwrap();
        let s = initial_spectrum(&spec, &grid).unwrap();
        let m = SpectrometerModel::new(16.0 * s.step_nm(), 0.0, None).unwrap();
        let binned = bin_spectrum(&s, &m).unwrap();
        let rel = (binned.integrated_power() / s.integrated_power() - 1.0).abs();
        assert!(rel < 1e-10, "power mismatch {rel}");
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let spec = probe();
        let s = initial_spectrum(&spec, &spec.default_grid()).unwrap();
        let m = SpectrometerModel::new(s.step_nm() / 4.0, 0.0, None).unwrap();
        assert!(matches!(
            bin_spectrum(&s, &m),
            Err(Error::GridCoarserThanResolution { .. })
        ));
    }

    #[test]
    fn weak_postselected_signal_falls_below_the_floor() {
        // At beta = 0.0005 the survival probability is 2.5e-7, so with
        // I0 = 1 every bin of the post-selected spectrum sits under a 1e-6
        // floor and detection fails.
        let spec = probe();
        let wv = weak_value_closed_form(0.0005, 0.0).unwrap();
        let m = SpectrometerModel::new(0.02, 1e-6, None).unwrap();
        let grid = binnable_grid(&spec, &m, 0);
        let post = postselected_spectrum(&spec, &wv, &grid).unwrap();
        let binned = bin_spectrum(&post, &m).unwrap();
        assert!(binned.intensities().iter().all(|&v| v == 0.0));
        // The probability itself clears an I0 = 10 budget.
        let bright = ProbeSpec::new(840.0, 150.0, 10.0).unwrap();
        let post = postselected_spectrum(&bright, &wv, &grid).unwrap();
        let binned = bin_spectrum(&post, &m).unwrap();
        assert!(binned.intensities().iter().any(|&v| v > 0.0));
    }

    #[test]
    fn saturation_clips_bins() {
        let spec = probe();
        let s = initial_spectrum(&spec, &spec.default_grid()).unwrap();
        let m = SpectrometerModel::new(4.0 * s.step_nm(), 0.0, Some(0.5)).unwrap();
        let binned = bin_spectrum(&s, &m).unwrap();
        let (_, peak) = binned.peak();
        assert!(peak <= 0.5 + 1e-15);
    }

    #[test]
    fn detection_limit_reproduces_the_quoted_numbers() {
        let m = SpectrometerModel::default();
        let v = detection_limit(5.4e9, &m);
        assert!((v / 3.7e-12 - 1.0).abs() < 0.01, "v = {v}");
        let v = detection_limit(3.4e8, &m);
        assert!((v / 5.9e-11 - 1.0).abs() < 0.01, "v = {v}");
        // Monotonicity in both arguments; infinite sensitivity resolves
        // everything.
        assert!(detection_limit(1e10, &m) < detection_limit(1e9, &m));
        let coarse = SpectrometerModel::new(0.2, 0.0, None).unwrap();
        assert!(detection_limit(1e9, &coarse) > detection_limit(1e9, &m));
        assert_eq!(detection_limit(f64::INFINITY, &m), 0.0);
    }

    #[test]
    fn classical_limit_matches_the_fog_baseline() {
        let cfg = SagnacConfig::new(500.0, 1e-6).unwrap();
        let readout = ClassicalReadout::new(1.0, 1e-7).unwrap();
        let v = classical_velocity_limit(&cfg, &readout);
        assert!((v / 4.8e-9 - 1.0).abs() < 0.01, "v = {v}");
        // Linearity in 1/NL.
        let cfg2 = SagnacConfig::new(1000.0, 1e-6).unwrap();
        let v2 = classical_velocity_limit(&cfg2, &readout);
        assert!((v2 / (v / 2.0) - 1.0).abs() < 1e-12);
        // Round trip with the phase relation.
        let phi = crate::sagnac::phase_from_velocity(&cfg, v);
        assert!((phi / 1e-7 - 1.0).abs() < 1e-12);
        // The limit vanishes with the phase resolution (the readout type
        // itself requires a strictly positive resolution).
        let vanishing = ClassicalReadout::new(1.0, 1e-300).unwrap();
        assert!(classical_velocity_limit(&cfg, &vanishing) < 1e-290);
        assert!(ClassicalReadout::new(1.0, 0.0).is_err());
    }

    #[test]
    fn classical_intensity_fringe_shape() {
        assert_eq!(classical_intensity(1.0, 0.0), 2.0);
        assert!(classical_intensity(1.0, std::f64::consts::PI) < 1e-15);
        // Quadratic insensitivity at the fringe top.
        let drop = 2.0 - classical_intensity(1.0, 1e-7);
        assert!(drop < 1e-13, "drop = {drop}");
    }

    #[test]
    fn noise_is_reproducible_and_nonnegative() {
        let spec = probe();
        let s = initial_spectrum(&spec, &spec.default_grid()).unwrap();
        let lcg = |state: &mut u64| {
            *state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (*state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut s1 = 42u64;
        let mut s2 = 42u64;
        let a = add_gaussian_noise(&s, 0.01, &mut || lcg(&mut s1));
        let b = add_gaussian_noise(&s, 0.01, &mut || lcg(&mut s2));
        assert_eq!(a.intensities(), b.intensities());
        assert!(a.intensities().iter().all(|&v| v >= 0.0));
        assert_ne!(a.intensities(), s.intensities());
    }

    #[test]
    fn binned_center_is_recovered_to_sub_bin_accuracy() {
        let spec = probe();
        let m = SpectrometerModel::default();
        let grid = binnable_grid(&spec, &m, 0);
        let wv = weak_value_closed_form(0.001, 2.5e-9).unwrap();
        let post = postselected_spectrum(&spec, &wv, &grid).unwrap();
        let unbinned = fit_center(&post).unwrap().center_nm;
        let binned = bin_spectrum(&post, &m).unwrap();
        let rebinned = fit_center(&binned).unwrap().center_nm;
        assert!(
            (rebinned - unbinned).abs() < 0.002,
            "binned center off by {}",
            rebinned - unbinned
        );
    }
}
