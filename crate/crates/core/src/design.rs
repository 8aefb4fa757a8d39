//! Forward sensitivity sweeps and the constraint-driven inverse design.
//!
//! The small-signal sensitivity of the sensor, central-wavelength shift per
//! unit velocity, has the closed form
//!
//! ```text
//! k0(beta) = 16 pi^2 dlambda^2 NL cos(2 beta) / (c lambda0^2 sin^2 beta)
//! ```
//!
//! obtained by chaining the phase-velocity relation, the small-angle weak
//! value and the analytic spectral shift. Sweeps fit the same slope from
//! simulated shift/velocity pairs and are held against `k0`; the inverse
//! solver picks the post-selection angle and fiber length that satisfy a
//! detector floor and a target velocity, or reports infeasibility.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

use crate::error::{ensure_positive, Error, Result};
use crate::exec;
use crate::polarization::{postselection_probability, weak_value_closed_form, WeakValueResult};
use crate::sagnac::{phase_from_velocity, SagnacConfig};
use crate::spectrum::{analytic_shift, ProbeSpec, ShiftEstimate};

/// Sensitivity commonly quoted for beta = 0.001 rad at lambda0 = 840 nm,
/// dlambda = 150 nm, NL = 500 m. Inconsistent with [`sensitivity_k0`]; see
/// [`reference_k_note`].
pub const QUOTED_K_BETA_001_NM_PER_MPS: f64 = 5.4e9;

/// The documented discrepancy between the quoted beta = 0.001 sensitivity
/// and the closed-form slope. Attached to sweep reports that fit that angle.
pub fn reference_k_note() -> String {
    "for beta = 0.0010 rad the commonly quoted sensitivity 5.4e9 nm/(m/s) disagrees with the \
     closed-form small-signal slope k0 = 16*pi^2*dlambda^2*NL*cos(2*beta)/(c*lambda0^2*sin^2(beta)), \
     which gives 8.4e9 nm/(m/s) at lambda0 = 840 nm, dlambda = 150 nm, NL = 500 m; the 0.0050 and \
     0.0005 rad entries match the same expression to two significant figures, so 5.4e9 is suspected \
     to be a misprint for 8.4e9. Detection limits are reported for both values."
        .to_string()
}

/// Full sensor parameterization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub sagnac: SagnacConfig,
    pub probe: ProbeSpec,
    /// Post-selection offset angle, rad. Amplification needs
    /// `0 < beta < pi/4`; zero is representable so the degenerate selection
    /// surfaces as a computation error rather than a parse error.
    pub beta_rad: f64,
    /// Pick-off splitter ratio, recorded as metadata only.
    pub bs_ratio: Option<String>,
}

impl SensorConfig {
    pub fn new(sagnac: SagnacConfig, probe: ProbeSpec, beta_rad: f64) -> Result<Self> {
        let sagnac = sagnac.validated()?;
        if !(0.0..FRAC_PI_4).contains(&beta_rad) {
            return Err(Error::InvalidParameter {
                name: "beta_rad",
                value: beta_rad,
                constraint:
                    "must satisfy 0 <= beta < pi/4 (beta = pi/4 gives A_w = 1, no amplification)",
            });
        }
        let lambda_m_from_probe = probe.lambda0_nm * 1e-9;
        if ((lambda_m_from_probe - sagnac.lambda0_m) / sagnac.lambda0_m).abs() > 1e-6 {
            return Err(Error::InvalidParameter {
                name: "lambda0_m",
                value: sagnac.lambda0_m,
                constraint: "must agree with the probe central wavelength within 1e-6 relative",
            });
        }
        Ok(Self {
            sagnac,
            probe,
            beta_rad,
            bs_ratio: None,
        })
    }

    pub fn with_bs_ratio(mut self, ratio: impl Into<String>) -> Self {
        self.bs_ratio = Some(ratio.into());
        self
    }
}

/// One full pass through the measurement chain at a single velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedPoint {
    pub phi_rad: f64,
    pub weak_value: WeakValueResult,
    pub shift: ShiftEstimate,
}

/// Phase, weak value and analytic shift for one velocity. Deterministic;
/// propagates the degenerate-selection error (e.g. `beta = 0`, `v = 0`).
pub fn simulate_point(cfg: &SensorConfig, velocity_mps: f64) -> Result<SimulatedPoint> {
    let phi_rad = phase_from_velocity(&cfg.sagnac, velocity_mps);
    let weak_value = weak_value_closed_form(cfg.beta_rad, phi_rad)?;
    let shift = analytic_shift(&cfg.probe, weak_value.im_a_w);
    Ok(SimulatedPoint {
        phi_rad,
        weak_value,
        shift,
    })
}

/// Closed-form small-signal sensitivity `|d(shift)/dv|` in nm per (m/s),
/// valid for `beta` in (0, pi/4).
pub fn sensitivity_k0(probe: &ProbeSpec, sagnac: &SagnacConfig, beta_rad: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let dl2 = probe.width_nm * probe.width_nm;
    let sin_b = beta_rad.sin();
    16.0 * pi * pi * dl2 * sagnac.nl_m * (2.0 * beta_rad).cos()
        / (sagnac.c_mps * probe.lambda0_nm * sagnac.lambda0_m * sin_b * sin_b)
}

/// Analytic shift at a finite phase, without the small-signal linearization.
fn shift_at(probe: &ProbeSpec, beta_rad: f64, phi_rad: f64) -> Result<f64> {
    let wv = weak_value_closed_form(beta_rad, phi_rad)?;
    Ok(analytic_shift(probe, wv.im_a_w).delta_lambda0_nm)
}

/// Fitted sensitivity for one post-selection angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub beta_rad: f64,
    /// Velocities that passed the regime check, input order.
    pub velocities_mps: Vec<f64>,
    /// Analytic shifts at those velocities, nm.
    pub shifts_nm: Vec<f64>,
    /// Magnitude of the through-origin least-squares slope, nm per (m/s).
    pub fitted_k_nm_per_mps: f64,
    /// Signed slope; shifts run opposite to the velocity sign for
    /// `beta < pi/4`.
    pub slope_nm_per_mps: f64,
    /// Closed-form slope for the same parameters.
    pub k0_nm_per_mps: f64,
    /// Survival probability at zero phase.
    pub p_postselect: f64,
    /// RMS misfit of the linear model relative to the largest shift.
    pub linear_fit_residual: f64,
}

/// A velocity excluded from the fit because its phase leaves the
/// small-signal regime `|phi| <= sin(beta) / 100`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutOfRegimePoint {
    pub beta_rad: f64,
    pub velocity_mps: f64,
    pub phi_rad: f64,
    pub phi_limit_rad: f64,
}

/// Everything a sweep produced: per-angle fits, the excluded pairs and any
/// documentation notes triggered by the swept angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub results: Vec<SweepResult>,
    pub excluded: Vec<OutOfRegimePoint>,
    pub notes: Vec<String>,
}

/// Sweeps shift vs velocity for each angle and fits the sensitivity slope,
/// in parallel when the `parallel` feature is enabled.
///
/// Out-of-regime (beta, velocity) pairs are excluded from the fit and
/// reported in the result; an angle left with fewer than 3 usable points
/// fails with [`Error::RegimeViolation`]. Results are aggregated in input
/// order regardless of execution order.
pub fn sweep_beta_velocity(
    sagnac: &SagnacConfig,
    probe: &ProbeSpec,
    betas: &[f64],
    velocities: &[f64],
) -> Result<SweepReport> {
    sweep_impl(sagnac, probe, betas, velocities, true)
}

/// Always-sequential variant of [`sweep_beta_velocity`], kept for
/// determinism checks and the comparison benchmarks.
pub fn sweep_beta_velocity_seq(
    sagnac: &SagnacConfig,
    probe: &ProbeSpec,
    betas: &[f64],
    velocities: &[f64],
) -> Result<SweepReport> {
    sweep_impl(sagnac, probe, betas, velocities, false)
}

fn sweep_impl(
    sagnac: &SagnacConfig,
    probe: &ProbeSpec,
    betas: &[f64],
    velocities: &[f64],
    parallel: bool,
) -> Result<SweepReport> {
    let eval = |beta: &f64| eval_beta(sagnac, probe, *beta, velocities);
    let per_beta: Vec<Result<(SweepResult, Vec<OutOfRegimePoint>)>> = if parallel {
        exec::map_collect(betas, eval)
    } else {
        exec::map_collect_seq(betas, eval)
    };
    let mut results = Vec::with_capacity(betas.len());
    let mut excluded = Vec::new();
    for item in per_beta {
        let (res, mut out) = item?;
        excluded.append(&mut out);
        results.push(res);
    }
    let mut notes = Vec::new();
    if betas.iter().any(|b| (b - 0.001).abs() <= 1e-12) {
        notes.push(reference_k_note());
    }
    Ok(SweepReport {
        results,
        excluded,
        notes,
    })
}

fn eval_beta(
    sagnac: &SagnacConfig,
    probe: &ProbeSpec,
    beta: f64,
    velocities: &[f64],
) -> Result<(SweepResult, Vec<OutOfRegimePoint>)> {
    if !(beta > 0.0 && beta < FRAC_PI_4) {
        return Err(Error::InvalidParameter {
            name: "beta_rad",
            value: beta,
            constraint: "sweep angles must satisfy 0 < beta < pi/4",
        });
    }
    let phi_limit = beta.sin() / 100.0;
    let mut usable_v = Vec::with_capacity(velocities.len());
    let mut shifts = Vec::with_capacity(velocities.len());
    let mut excluded = Vec::new();
    for &v in velocities {
        let phi = phase_from_velocity(sagnac, v);
        if phi.abs() > phi_limit {
            excluded.push(OutOfRegimePoint {
                beta_rad: beta,
                velocity_mps: v,
                phi_rad: phi,
                phi_limit_rad: phi_limit,
            });
            continue;
        }
        shifts.push(shift_at(probe, beta, phi)?);
        usable_v.push(v);
    }
    let sum_vv: f64 = usable_v.iter().map(|v| v * v).sum();
    if usable_v.len() < 3 || sum_vv == 0.0 {
        return Err(Error::RegimeViolation {
            beta_rad: beta,
            usable: usable_v.len(),
            excluded: excluded
                .iter()
                .map(|p| (p.beta_rad, p.velocity_mps))
                .collect(),
        });
    }
    // Least squares through the origin: the shift vanishes identically at
    // v = 0, so an intercept would be unidentifiable.
    let sum_vs: f64 = usable_v.iter().zip(&shifts).map(|(v, s)| v * s).sum();
    let slope = sum_vs / sum_vv;
    let max_shift = shifts.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let sse: f64 = usable_v
        .iter()
        .zip(&shifts)
        .map(|(v, s)| {
            let r = s - slope * v;
            r * r
        })
        .sum();
    let residual = if max_shift > 0.0 {
        (sse / usable_v.len() as f64).sqrt() / max_shift
    } else {
        0.0
    };
    Ok((
        SweepResult {
            beta_rad: beta,
            velocities_mps: usable_v,
            shifts_nm: shifts,
            fitted_k_nm_per_mps: slope.abs(),
            slope_nm_per_mps: slope,
            k0_nm_per_mps: sensitivity_k0(probe, sagnac, beta),
            p_postselect: postselection_probability(beta, 0.0),
            linear_fit_residual: residual,
        },
        excluded,
    ))
}

/// What the instrument must achieve and what it has to work with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConstraints {
    /// Peak intensity of the source.
    pub i0: f64,
    /// Detector floor: a bin below this reads zero.
    pub floor: f64,
    /// Spectrometer resolution, nm.
    pub resolution_nm: f64,
    /// Smallest velocity the instrument must resolve, m/s.
    pub target_velocity_mps: f64,
    /// Longest moving-arm fiber available, m.
    pub nl_max_m: f64,
}

impl DesignConstraints {
    pub fn new(
        i0: f64,
        floor: f64,
        resolution_nm: f64,
        target_velocity_mps: f64,
        nl_max_m: f64,
    ) -> Result<Self> {
        ensure_positive("i0", i0)?;
        ensure_positive("floor", floor)?;
        ensure_positive("resolution_nm", resolution_nm)?;
        ensure_positive("target_velocity_mps", target_velocity_mps)?;
        ensure_positive("nl_max_m", nl_max_m)?;
        if floor >= i0 {
            return Err(Error::InvalidParameter {
                name: "floor",
                value: floor,
                constraint: "must be below the peak intensity i0",
            });
        }
        Ok(Self {
            i0,
            floor,
            resolution_nm,
            target_velocity_mps,
            nl_max_m,
        })
    }
}

/// The solved design, or the best achievable point when infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignRecommendation {
    /// Recommended post-selection angle, rad.
    pub beta_rad: f64,
    /// Recommended moving-arm length, m (always the maximum available).
    pub nl_m: f64,
    /// Small-signal sensitivity at the recommendation, nm per (m/s).
    pub predicted_k_nm_per_mps: f64,
    /// Resolution-limited smallest velocity, m/s. Infinite (serialized as
    /// null) when no angle clears the detector floor.
    pub predicted_vmin_mps: f64,
    /// Survival probability at zero phase.
    pub p_postselect: f64,
    pub feasible: bool,
    /// Smallest angle whose post-selected power clears the floor.
    pub beta_floor_rad: f64,
    /// Detection limit at that smallest angle: the best this hardware can
    /// do, m/s.
    pub vmin_at_beta_floor_mps: f64,
}

/// Headroom applied to the floor constraint so bin quantization cannot eat
/// an exact-equality margin.
const FLOOR_MARGIN: f64 = 1e-6;
/// Headroom applied to the detectability constraint so fit numerics cannot
/// eat an exact-equality margin.
const DETECT_MARGIN: f64 = 1e-6;

/// Solves for the post-selection angle and fiber length.
///
/// The floor fixes the smallest usable angle
/// `beta_floor = asin(sqrt(floor / i0))`; sensitivity then decides
/// feasibility at `nl_max`. When feasible with margin, the angle is pushed
/// to the largest value still resolving the target velocity, maximizing the
/// photon budget. All reported fields are recomputed at the final angle. An
/// infeasible set of constraints is an answer (`feasible = false` with the
/// best achievable detection limit), never an error.
pub fn recommend_design(
    c: &DesignConstraints,
    probe: &ProbeSpec,
    sagnac_template: &SagnacConfig,
) -> Result<DesignRecommendation> {
    let sagnac = SagnacConfig {
        nl_m: c.nl_max_m,
        ..*sagnac_template
    }
    .validated()?;
    let ratio = (c.floor * (1.0 + FLOOR_MARGIN) / c.i0).min(1.0);
    let beta_floor = ratio.sqrt().asin();
    if beta_floor >= FRAC_PI_4 {
        // Even the least selective allowed angle starves the detector.
        return Ok(DesignRecommendation {
            beta_rad: beta_floor,
            nl_m: c.nl_max_m,
            predicted_k_nm_per_mps: 0.0,
            predicted_vmin_mps: f64::INFINITY,
            p_postselect: postselection_probability(beta_floor, 0.0),
            feasible: false,
            beta_floor_rad: beta_floor,
            vmin_at_beta_floor_mps: f64::INFINITY,
        });
    }
    let phi_target = phase_from_velocity(&sagnac, c.target_velocity_mps);
    let detectable = |beta: f64| -> bool {
        shift_at(probe, beta, phi_target)
            .map(|s| s.abs() >= c.resolution_nm * (1.0 + DETECT_MARGIN))
            .unwrap_or(false)
    };
    let k_floor = sensitivity_k0(probe, &sagnac, beta_floor);
    let vmin_floor = c.resolution_nm / k_floor;
    if !detectable(beta_floor) {
        return Ok(DesignRecommendation {
            beta_rad: beta_floor,
            nl_m: c.nl_max_m,
            predicted_k_nm_per_mps: k_floor,
            predicted_vmin_mps: vmin_floor,
            p_postselect: postselection_probability(beta_floor, 0.0),
            feasible: false,
            beta_floor_rad: beta_floor,
            vmin_at_beta_floor_mps: vmin_floor,
        });
    }
    // Largest detectable angle by bisection; the lower bound stays
    // detectable throughout, so the returned angle always satisfies the
    // constraint even in pathological non-monotone corners.
    let mut lo = beta_floor;
    let mut hi = FRAC_PI_4 - 1e-12;
    if detectable(hi) {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if detectable(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let beta = lo;
    let k = sensitivity_k0(probe, &sagnac, beta);
    Ok(DesignRecommendation {
        beta_rad: beta,
        nl_m: c.nl_max_m,
        predicted_k_nm_per_mps: k,
        predicted_vmin_mps: c.resolution_nm / k,
        p_postselect: postselection_probability(beta, 0.0),
        feasible: true,
        beta_floor_rad: beta_floor,
        vmin_at_beta_floor_mps: vmin_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_sensor(beta: f64) -> SensorConfig {
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        SensorConfig::new(sagnac, probe, beta)
            .unwrap()
            .with_bs_ratio("1:1000")
    }

    fn small_velocity_grid() -> Vec<f64> {
        (1..=8).map(|i| i as f64 * 1.25e-9).collect()
    }

    #[test]
    fn zero_velocity_gives_zero_shift_and_base_probability() {
        let cfg = reference_sensor(0.001);
        let point = simulate_point(&cfg, 0.0).unwrap();
        assert_eq!(point.shift.delta_lambda0_nm, 0.0);
        let expected_p = 0.001f64.sin().powi(2);
        assert!((point.weak_value.p_postselect - expected_p).abs() < 1e-18);
    }

    #[test]
    fn single_point_slope_matches_closed_form() {
        let cfg = reference_sensor(0.001);
        let v = 1e-10;
        let point = simulate_point(&cfg, v).unwrap();
        let k0 = sensitivity_k0(&cfg.probe, &cfg.sagnac, cfg.beta_rad);
        let rel = (point.shift.delta_lambda0_nm.abs() / (k0 * v) - 1.0).abs();
        assert!(rel < 5e-3, "relative error {rel}");
    }

    #[test]
    fn shift_per_velocity_reproduces_the_coarse_sensitivities() {
        let cfg = reference_sensor(0.005);
        let v = 1e-9;
        let point = simulate_point(&cfg, v).unwrap();
        let k = point.shift.delta_lambda0_nm.abs() / v;
        assert!((k / 3.4e8 - 1.0).abs() < 0.05, "k = {k}");
        let cfg = reference_sensor(0.0005);
        let point = simulate_point(&cfg, v).unwrap();
        let k = point.shift.delta_lambda0_nm.abs() / v;
        assert!((k / 3.4e10 - 1.0).abs() < 0.05, "k = {k}");
    }

    #[test]
    fn sweep_fits_match_the_closed_form_and_the_probability_column() {
        let cfg = reference_sensor(0.001);
        let report = sweep_beta_velocity(
            &cfg.sagnac,
            &cfg.probe,
            &[0.005, 0.001, 0.0005],
            &small_velocity_grid(),
        )
        .unwrap();
        assert_eq!(report.results.len(), 3);
        assert!(report.excluded.is_empty());
        let expected_p = [2.5e-5, 1.0e-6, 2.5e-7];
        for (res, p_ref) in report.results.iter().zip(expected_p) {
            let rel = (res.fitted_k_nm_per_mps / res.k0_nm_per_mps - 1.0).abs();
            assert!(rel < 0.01, "beta {}: fit vs k0 off by {rel}", res.beta_rad);
            assert!((res.p_postselect / p_ref - 1.0).abs() < 0.02);
            assert!(res.fitted_k_nm_per_mps > 0.0);
            assert!(res.slope_nm_per_mps < 0.0);
            assert!(res.linear_fit_residual < 1e-3);
        }
        // The quoted-value note rides along whenever 0.001 rad is swept.
        assert_eq!(report.notes.len(), 1);
        assert!(report.notes[0].contains("5.4e9"));
        assert!(report.notes[0].contains("8.4e9"));
    }

    #[test]
    fn parallel_and_sequential_sweeps_agree_exactly() {
        let cfg = reference_sensor(0.001);
        let betas: Vec<f64> = (1..=20).map(|i| i as f64 * 5e-4).collect();
        let velocities: Vec<f64> = (1..=50).map(|i| i as f64 * 2e-11).collect();
        let par = sweep_beta_velocity(&cfg.sagnac, &cfg.probe, &betas, &velocities).unwrap();
        let seq = sweep_beta_velocity_seq(&cfg.sagnac, &cfg.probe, &betas, &velocities).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn out_of_regime_points_are_excluded_not_fitted() {
        let cfg = reference_sensor(0.001);
        // 1e-5 m/s pushes phi far beyond sin(beta)/100 for all three angles.
        let mut velocities = small_velocity_grid();
        velocities.push(1e-5);
        let report = sweep_beta_velocity(&cfg.sagnac, &cfg.probe, &[0.001], &velocities).unwrap();
        assert_eq!(report.excluded.len(), 1);
        assert_eq!(report.excluded[0].velocity_mps, 1e-5);
        assert_eq!(report.results[0].velocities_mps.len(), 8);
    }

    #[test]
    fn too_few_usable_points_is_an_error() {
        let cfg = reference_sensor(0.001);
        let err = sweep_beta_velocity(&cfg.sagnac, &cfg.probe, &[0.001], &[0.0]);
        assert!(matches!(err, Err(Error::RegimeViolation { .. })));
        // All points out of regime fails the same way, listing the pairs.
        let err = sweep_beta_velocity(&cfg.sagnac, &cfg.probe, &[0.0005], &[1e-3, 2e-3, 3e-3]);
        match err {
            Err(Error::RegimeViolation { excluded, .. }) => assert_eq!(excluded.len(), 3),
            other => panic!("expected RegimeViolation, got {other:?}"),
        }
    }

    #[test]
    fn sensitivity_is_monotone_and_scales_linearly() {
        let cfg = reference_sensor(0.001);
        let mut prev_k = f64::INFINITY;
        let mut prev_p = 0.0;
        for i in 1..40 {
            let beta = i as f64 * (FRAC_PI_4 * 0.99) / 40.0;
            let k = sensitivity_k0(&cfg.probe, &cfg.sagnac, beta);
            let p = postselection_probability(beta, 0.0);
            assert!(k < prev_k, "k0 must strictly decrease with beta");
            assert!(p > prev_p, "p must strictly increase with beta");
            prev_k = k;
            prev_p = p;
        }
        // Doubling NL doubles k0; doubling dlambda quadruples it.
        let base = sensitivity_k0(&cfg.probe, &cfg.sagnac, 0.001);
        let double_nl = SagnacConfig::new(1000.0, 840e-9).unwrap();
        let k2 = sensitivity_k0(&cfg.probe, &double_nl, 0.001);
        assert!((k2 / base - 2.0).abs() < 1e-3);
        let wide = ProbeSpec::new(840.0, 300.0, 1.0).unwrap();
        let k4 = sensitivity_k0(&wide, &cfg.sagnac, 0.001);
        assert!((k4 / base - 4.0).abs() < 1e-3);
    }

    #[test]
    fn recommendation_solves_the_reference_constraints() {
        let c = DesignConstraints::new(1.0, 1e-6, 0.02, 5e-12, 500.0).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let rec = recommend_design(&c, &probe, &sagnac).unwrap();
        assert!(rec.feasible);
        assert!((rec.beta_floor_rad / 0.001 - 1.0).abs() < 0.02);
        assert!((rec.vmin_at_beta_floor_mps / 2.4e-12 - 1.0).abs() < 0.02);
        // The angle is pushed up for photon budget, but never past the
        // target constraint.
        assert!(rec.beta_rad > rec.beta_floor_rad);
        assert!(rec.predicted_vmin_mps <= c.target_velocity_mps);
        assert!(c.i0 * rec.p_postselect >= c.floor);
    }

    #[test]
    fn opaque_detector_is_infeasible() {
        let c = DesignConstraints::new(1.0, 1.0 - 1e-12, 0.02, 5e-12, 500.0).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let rec = recommend_design(&c, &probe, &sagnac).unwrap();
        assert!(!rec.feasible);
        assert!(rec.beta_floor_rad >= FRAC_PI_4);
        assert!(rec.predicted_vmin_mps.is_infinite());
    }

    #[test]
    fn loose_target_is_feasible_with_a_large_angle() {
        let c = DesignConstraints::new(1.0, 1e-6, 0.02, 1e-3, 500.0).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let rec = recommend_design(&c, &probe, &sagnac).unwrap();
        assert!(rec.feasible);
        assert!(rec.beta_rad > 0.1, "beta = {}", rec.beta_rad);
        assert!(rec.beta_rad < FRAC_PI_4);
        assert!(rec.predicted_vmin_mps <= c.target_velocity_mps);
    }

    #[test]
    fn unreachable_target_reports_the_best_achievable_limit() {
        let c = DesignConstraints::new(1.0, 1e-6, 0.02, 1e-13, 500.0).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let rec = recommend_design(&c, &probe, &sagnac).unwrap();
        assert!(!rec.feasible);
        assert!(rec.predicted_vmin_mps > c.target_velocity_mps);
        assert_eq!(rec.beta_rad, rec.beta_floor_rad);
        assert_eq!(rec.predicted_vmin_mps, rec.vmin_at_beta_floor_mps);
    }

    #[test]
    fn sensor_config_validates_the_amplification_regime() {
        let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
        let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
        assert!(SensorConfig::new(sagnac, probe, FRAC_PI_4).is_err());
        assert!(SensorConfig::new(sagnac, probe, -0.001).is_err());
        // beta = 0 parses; the degeneracy surfaces when computing at v = 0.
        let cfg = SensorConfig::new(sagnac, probe, 0.0).unwrap();
        assert!(matches!(
            simulate_point(&cfg, 0.0),
            Err(Error::DegeneratePostselection { .. })
        ));
        // Wavelength disagreement between probe and interferometer.
        let mismatched = SagnacConfig::new(500.0, 850e-9).unwrap();
        assert!(SensorConfig::new(mismatched, probe, 0.001).is_err());
    }
}
