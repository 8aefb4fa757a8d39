//! `wva`: simulate and design a weak-value amplified fiber-optic
//! velocimeter from the command line.
//!
//! Subcommands: `simulate | spectrum | sweep | design | classical`.
//! Exit codes: 0 ok, 2 config error, 3 degenerate selection, 4 I/O error,
//! 5 regime violation.

mod config;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::RunConfig;
use report::{print_json, print_scalar_csv, sig12, write_file};
use wva_core::design::{
    recommend_design, sensitivity_k0, simulate_point, sweep_beta_velocity, SweepReport,
};
use wva_core::instrument::{add_gaussian_noise, bin_spectrum, classical_velocity_limit};
use wva_core::spectrum::{
    analytic_shift, fit_center, initial_spectrum, postselected_spectrum_with, Spectrum,
};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Degenerate(String),
    Io { path: String, message: String },
    Regime(String),
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Regime(_) => 5,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m)
            | CliError::Degenerate(m)
            | CliError::Regime(m)
            | CliError::Other(m) => m.clone(),
            CliError::Io { path, message } => format!("i/o failure on {path}: {message}"),
        }
    }
}

impl From<wva_core::Error> for CliError {
    fn from(e: wva_core::Error) -> Self {
        use wva_core::Error::*;
        match e {
            DegeneratePostselection { .. } => CliError::Degenerate(e.to_string()),
            RegimeViolation { .. } | ShiftRegimeExceeded { .. } => CliError::Regime(e.to_string()),
            Io { path, message } => CliError::Io { path, message },
            FitDegenerate { .. } => CliError::Other(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "wva",
    version,
    about = "Weak-value amplified fiber-optic velocimetry: simulation, sweeps and inverse design"
)]
struct Cli {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for file-producing subcommands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Stdout format for scalar reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase, weak value and central-wavelength shift at one velocity.
    Simulate {
        /// Fiber velocity, m/s.
        #[arg(long)]
        velocity_mps: f64,
    },
    /// Write initial, post-selected and binned spectra as CSV.
    Spectrum {
        /// Fiber velocity, m/s.
        #[arg(long)]
        velocity_mps: f64,
    },
    /// Fit sensitivity slopes over a (beta, velocity) grid.
    Sweep {
        /// Post-selection angles, rad (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        /// Velocities, m/s (comma-separated).
        #[arg(long, value_delimiter = ',', required = true)]
        velocities: Vec<f64>,
    },
    /// Solve for the post-selection angle and fiber length under the
    /// configured constraints.
    Design,
    /// Classical fringe-readout baseline for the configured interferometer.
    Classical,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.validate()?;
    match &cli.command {
        Command::Simulate { velocity_mps } => cmd_simulate(&cfg, *velocity_mps, cli.format),
        Command::Spectrum { velocity_mps } => {
            cmd_spectrum(&cfg, *velocity_mps, cli.out.as_deref(), cli.format)
        }
        Command::Sweep { betas, velocities } => {
            cmd_sweep(&cfg, betas, velocities, cli.out.as_deref(), cli.format)
        }
        Command::Design => cmd_design(&cfg, cli.format),
        Command::Classical => cmd_classical(&cfg, cli.format),
    }
}

fn emit_scalar(report: &serde_json::Value, format: Format) {
    match format {
        Format::Json => print_json(report),
        Format::Csv => print_scalar_csv(report),
    }
}

fn cmd_simulate(cfg: &RunConfig, velocity_mps: f64, format: Format) -> Result<u8, CliError> {
    let sensor = cfg.sensor()?;
    let point = simulate_point(&sensor, velocity_mps)?;
    let k0 = sensitivity_k0(&sensor.probe, &sensor.sagnac, sensor.beta_rad);
    let report = json!({
        "velocity_mps": sig12(velocity_mps),
        "phi_rad": sig12(point.phi_rad),
        "a_w_re": sig12(point.weak_value.a_w.re),
        "a_w_im": sig12(point.weak_value.a_w.im),
        "p_postselect": sig12(point.weak_value.p_postselect),
        "delta_lambda0_nm": sig12(point.shift.delta_lambda0_nm),
        "center_nm": sig12(point.shift.center_nm),
        "k0_nm_per_mps": sig12(k0),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    emit_scalar(&report, format);
    Ok(0)
}

fn spectrum_csv_bytes(s: &Spectrum) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(s.len() * 24);
    s.write_csv(&mut bytes).expect("vec writes cannot fail");
    bytes
}

fn cmd_spectrum(
    cfg: &RunConfig,
    velocity_mps: f64,
    out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    let Some(out) = out else {
        return Err(CliError::Config(
            "missing `--out`: the spectrum subcommand writes CSV files".to_string(),
        ));
    };
    let sensor = cfg.sensor()?;
    let probe = sensor.probe;
    let point = simulate_point(&sensor, velocity_mps)?;
    let grid = cfg.spectrum_grid(true)?;
    let initial = initial_spectrum(&probe, &grid)?;
    let post = postselected_spectrum_with(&probe, &point.weak_value, &grid, cfg.tilt_convention)?;
    let spectrometer = cfg.spectrometer()?;
    let mut binned = bin_spectrum(&post, &spectrometer)?;
    if cfg.noise_sigma > 0.0 {
        let mut uniform = splitmix_uniform(cfg.noise_seed);
        binned = add_gaussian_noise(&binned, cfg.noise_sigma, &mut uniform);
    }

    std::fs::create_dir_all(out).map_err(|e| CliError::Io {
        path: out.display().to_string(),
        message: e.to_string(),
    })?;
    let files = [
        ("initial.csv", &initial),
        ("postselected.csv", &post),
        ("binned.csv", &binned),
    ];
    for (name, spectrum) in files {
        write_file(&out.join(name), &spectrum_csv_bytes(spectrum))?;
    }

    let analytic = analytic_shift(&probe, point.weak_value.im_a_w);
    let report = json!({
        "velocity_mps": sig12(velocity_mps),
        "initial_center_nm": sig12(fit_center(&initial)?.center_nm),
        "postselected_center_nm": sig12(fit_center(&post)?.center_nm),
        "binned_center_nm": sig12(fit_center(&binned)?.center_nm),
        "analytic_center_nm": sig12(analytic.center_nm),
        "delta_lambda0_nm": sig12(analytic.delta_lambda0_nm),
        "grid_points": grid.len(),
        "files": ["initial.csv", "postselected.csv", "binned.csv"],
        "out_dir": out.display().to_string(),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    emit_scalar(&report, format);
    Ok(0)
}

fn sweep_csv(report: &SweepReport) -> String {
    let mut text =
        String::from("beta_rad,velocity_mps,shift_nm,fitted_k_nm_per_mps,p_postselect\n");
    for res in &report.results {
        for (v, shift) in res.velocities_mps.iter().zip(&res.shifts_nm) {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                res.beta_rad, v, shift, res.fitted_k_nm_per_mps, res.p_postselect
            ));
        }
    }
    text
}

fn sweep_summary(cfg: &RunConfig, report: &SweepReport) -> serde_json::Value {
    let results: Vec<serde_json::Value> = report
        .results
        .iter()
        .map(|r| {
            json!({
                "beta_rad": sig12(r.beta_rad),
                "n_points": r.velocities_mps.len(),
                "fitted_k_nm_per_mps": sig12(r.fitted_k_nm_per_mps),
                "slope_nm_per_mps": sig12(r.slope_nm_per_mps),
                "k0_nm_per_mps": sig12(r.k0_nm_per_mps),
                "p_postselect": sig12(r.p_postselect),
                "linear_fit_residual": sig12(r.linear_fit_residual),
            })
        })
        .collect();
    let excluded: Vec<serde_json::Value> = report
        .excluded
        .iter()
        .map(|p| {
            json!({
                "beta_rad": sig12(p.beta_rad),
                "velocity_mps": sig12(p.velocity_mps),
                "phi_rad": sig12(p.phi_rad),
                "phi_limit_rad": sig12(p.phi_limit_rad),
            })
        })
        .collect();
    json!({
        "results": results,
        "excluded": excluded,
        "notes": report.notes,
        "config": serde_json::to_value(cfg).expect("config serializes"),
    })
}

fn cmd_sweep(
    cfg: &RunConfig,
    betas: &[f64],
    velocities: &[f64],
    out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    let sensor = cfg.sensor()?;
    let report = sweep_beta_velocity(&sensor.sagnac, &sensor.probe, betas, velocities)?;
    let summary = sweep_summary(cfg, &report);
    let csv = sweep_csv(&report);
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(|e| CliError::Io {
            path: out.display().to_string(),
            message: e.to_string(),
        })?;
        write_file(&out.join("sweep.csv"), csv.as_bytes())?;
        let mut json_bytes = serde_json::to_vec_pretty(&summary).expect("summary serializes");
        json_bytes.push(b'\n');
        write_file(&out.join("summary.json"), &json_bytes)?;
    }
    match format {
        Format::Json => print_json(&summary),
        Format::Csv => print!("{csv}"),
    }
    if report.excluded.is_empty() {
        Ok(0)
    } else {
        for p in &report.excluded {
            eprintln!(
                "regime violation: beta = {} rad, velocity = {} m/s gives phi = {:.3e} rad beyond the small-signal limit {:.3e} rad; pair excluded from the fit",
                p.beta_rad, p.velocity_mps, p.phi_rad, p.phi_limit_rad
            );
        }
        Ok(5)
    }
}

fn cmd_design(cfg: &RunConfig, format: Format) -> Result<u8, CliError> {
    let constraints = cfg.design_constraints()?;
    let probe = cfg.probe()?;
    let sagnac = cfg.sagnac()?;
    let rec = recommend_design(&constraints, &probe, &sagnac)?;
    let classical = classical_velocity_limit(&sagnac, &cfg.classical_readout()?);
    let improvement = classical / rec.predicted_vmin_mps;
    let report = json!({
        "recommendation": {
            "beta_rad": sig12(rec.beta_rad),
            "nl_m": sig12(rec.nl_m),
            "predicted_k_nm_per_mps": sig12(rec.predicted_k_nm_per_mps),
            "predicted_vmin_mps": sig12(rec.predicted_vmin_mps),
            "p_postselect": sig12(rec.p_postselect),
            "feasible": rec.feasible,
            "beta_floor_rad": sig12(rec.beta_floor_rad),
            "vmin_at_beta_floor_mps": sig12(rec.vmin_at_beta_floor_mps),
        },
        "classical_vmin_mps": sig12(classical),
        "improvement_factor": sig12(improvement),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    emit_scalar(&report, format);
    Ok(0)
}

fn cmd_classical(cfg: &RunConfig, format: Format) -> Result<u8, CliError> {
    let sagnac = cfg.sagnac()?;
    let readout = cfg.classical_readout()?;
    let vmin = classical_velocity_limit(&sagnac, &readout);
    let report = json!({
        "classical_vmin_mps": sig12(vmin),
        "phase_resolution_rad": sig12(readout.phase_resolution_rad),
        "fringe_amplitude": sig12(readout.amplitude),
        "nl_m": sig12(sagnac.nl_m),
        "lambda0_nm": sig12(sagnac.lambda0_m * 1e9),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    emit_scalar(&report, format);
    Ok(0)
}

/// Deterministic uniform [0, 1) source for the optional per-bin noise.
fn splitmix_uniform(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}
