//! Flat JSON run configuration with unit-suffixed keys.
//!
//! Every key is optional and falls back to the built-in defaults (an 840 nm
//! superluminescent-diode probe of 150 nm width over a 500 m moving arm, a
//! 0.02 nm spectrometer with a 1e-6 floor). Unknown keys are rejected so a
//! typo cannot silently revert a parameter to its default.

use serde::{Deserialize, Serialize};
use std::path::Path;

use wva_core::design::{DesignConstraints, SensorConfig};
use wva_core::instrument::{ClassicalReadout, SpectrometerModel};
use wva_core::sagnac::{SagnacConfig, SPEED_OF_LIGHT_M_PER_S};
use wva_core::spectrum::{ProbeSpec, TiltConvention, WavelengthGrid};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Central wavelength of the probe, nm.
    pub lambda0_nm: f64,
    /// Gaussian width parameter of the probe, nm.
    pub delta_lambda_nm: f64,
    /// Peak intensity of the probe, arbitrary units.
    pub i0: f64,
    /// Total moving-arm fiber length N*L, m.
    pub nl_m: f64,
    /// Post-selection offset angle, rad.
    pub beta_rad: f64,
    /// Speed of light override, m/s.
    pub c_mps: f64,
    /// Spectrometer resolution, nm.
    pub resolution_nm: f64,
    /// Detector floor, intensity units.
    pub floor: f64,
    /// Detector saturation, intensity units.
    pub saturation: Option<f64>,
    /// Classical readout phase resolution, rad.
    pub phase_resolution_rad: f64,
    /// Design target: smallest velocity to resolve, m/s.
    pub target_velocity_mps: f64,
    /// Design budget: longest available moving arm, m.
    pub nl_max_m: f64,
    /// Pick-off splitter ratio, metadata only.
    pub bs_ratio: String,
    /// Minimum number of grid samples for synthesized spectra.
    pub grid_points: usize,
    /// Grid half-span in probe widths.
    pub grid_half_span_w: f64,
    /// Spectral tilt convention.
    pub tilt_convention: TiltConvention,
    /// Per-bin Gaussian noise sigma for robustness experiments; 0 = off.
    pub noise_sigma: f64,
    /// Seed for the per-bin noise.
    pub noise_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda0_nm: 840.0,
            delta_lambda_nm: 150.0,
            i0: 1.0,
            nl_m: 500.0,
            beta_rad: 0.001,
            c_mps: SPEED_OF_LIGHT_M_PER_S,
            resolution_nm: 0.02,
            floor: 1e-6,
            saturation: None,
            phase_resolution_rad: 1e-7,
            target_velocity_mps: 2.5e-12,
            nl_max_m: 500.0,
            bs_ratio: "1:1000".to_string(),
            grid_points: 4096,
            grid_half_span_w: 4.0,
            tilt_convention: TiltConvention::WavelengthLinear,
            noise_sigma: 0.0,
            noise_seed: 42,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Re-validates every module-level invariant; errors name the offending
    /// key.
    pub fn validate(&self) -> Result<(), CliError> {
        self.probe()?;
        self.sagnac()?;
        self.sensor()?;
        self.spectrometer()?;
        self.classical_readout()?;
        self.design_constraints()?;
        if self.grid_points < 16 {
            return Err(CliError::Config(format!(
                "invalid parameter `grid_points` = {}: must be >= 16",
                self.grid_points
            )));
        }
        if self.grid_half_span_w.is_nan() || self.grid_half_span_w < 4.0 {
            return Err(CliError::Config(format!(
                "invalid parameter `grid_half_span_w` = {}: must be >= 4 to avoid fit-biasing truncation",
                self.grid_half_span_w
            )));
        }
        if self.noise_sigma.is_nan() || self.noise_sigma < 0.0 {
            return Err(CliError::Config(format!(
                "invalid parameter `noise_sigma` = {}: must be >= 0",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    pub fn probe(&self) -> Result<ProbeSpec, CliError> {
        ProbeSpec::new(self.lambda0_nm, self.delta_lambda_nm, self.i0).map_err(config_err)
    }

    pub fn sagnac(&self) -> Result<SagnacConfig, CliError> {
        SagnacConfig::new(self.nl_m, self.lambda0_nm * 1e-9)
            .and_then(|c| c.with_speed_of_light(self.c_mps))
            .map_err(config_err)
    }

    pub fn sensor(&self) -> Result<SensorConfig, CliError> {
        Ok(
            SensorConfig::new(self.sagnac()?, self.probe()?, self.beta_rad)
                .map_err(config_err)?
                .with_bs_ratio(self.bs_ratio.clone()),
        )
    }

    pub fn spectrometer(&self) -> Result<SpectrometerModel, CliError> {
        SpectrometerModel::new(self.resolution_nm, self.floor, self.saturation).map_err(config_err)
    }

    pub fn classical_readout(&self) -> Result<ClassicalReadout, CliError> {
        ClassicalReadout::new(self.i0, self.phase_resolution_rad).map_err(config_err)
    }

    pub fn design_constraints(&self) -> Result<DesignConstraints, CliError> {
        DesignConstraints::new(
            self.i0,
            self.floor,
            self.resolution_nm,
            self.target_velocity_mps,
            self.nl_max_m,
        )
        .map_err(config_err)
    }

    /// Synthesis grid, refined beyond `grid_points` when the spectrum will
    /// be binned so the grid step stays below the spectrometer resolution.
    pub fn spectrum_grid(&self, for_binning: bool) -> Result<WavelengthGrid, CliError> {
        let probe = self.probe()?;
        let mut points = self.grid_points;
        if for_binning {
            let span = 2.0 * self.grid_half_span_w * probe.width_nm;
            let needed = (span / (0.5 * self.resolution_nm)).ceil() as usize + 1;
            points = points.max(needed);
        }
        probe
            .grid(points, self.grid_half_span_w)
            .map_err(config_err)
    }
}

fn config_err(e: wva_core::Error) -> CliError {
    CliError::Config(e.to_string())
}
