//! Generalized-Sagnac phase difference from fiber motion.
//!
//! Any moving stretch of fiber contributes to the phase difference between
//! the two counter-propagating beams in a loop, rotation or not. The phase
//! is the line integral of the fiber velocity along the light path,
//!
//! ```text
//! dPhi = (4 pi / (c lambda0)) * N * sum_segments (v . dl)
//! ```
//!
//! discretized here as a finite sum over piecewise-rigid segments. For the
//! canonical four-arm loop (one arm translating along itself at speed `v`,
//! the opposite arm fixed, the two flexible side arms cancelling each other)
//! this reduces to the closed form `phi = 4 pi v NL / (c lambda0)` with `NL`
//! the total moving-arm length.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// CODATA speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

const UNIT_TOLERANCE: f64 = 1e-12;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// One rigid piece of the fiber path: a length, a unit tangent and the
/// velocity of the fiber material along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    length_m: f64,
    direction: [f64; 3],
    velocity_mps: [f64; 3],
}

impl PathSegment {
    pub fn new(length_m: f64, direction: [f64; 3], velocity_mps: [f64; 3]) -> Result<Self> {
        ensure_positive("length_m", length_m)?;
        let norm = dot(direction, direction).sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "direction",
                value: norm,
                constraint: "must be a unit vector within 1e-12",
            });
        }
        Ok(Self {
            length_m,
            direction,
            velocity_mps,
        })
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn velocity_mps(&self) -> [f64; 3] {
        self.velocity_mps
    }

    /// The same segment traversed the opposite way.
    pub fn reversed(&self) -> Self {
        Self {
            length_m: self.length_m,
            direction: [-self.direction[0], -self.direction[1], -self.direction[2]],
            velocity_mps: self.velocity_mps,
        }
    }

    fn contribution(&self) -> f64 {
        dot(self.velocity_mps, self.direction) * self.length_m
    }
}

/// A closed fiber path traversed `turns` times.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopGeometry {
    segments: Vec<PathSegment>,
    turns: u32,
}

impl LoopGeometry {
    pub fn new(segments: Vec<PathSegment>, turns: u32) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter {
                name: "segments",
                value: 0.0,
                constraint: "at least one segment required",
            });
        }
        if turns == 0 {
            return Err(Error::InvalidParameter {
                name: "turns",
                value: 0.0,
                constraint: "must be >= 1",
            });
        }
        Ok(Self { segments, turns })
    }

    /// The canonical rectangular loop: a top arm of length `top_length_m`
    /// translating along itself at `top_velocity_mps`, a fixed bottom arm,
    /// and two side arms sharing `side_velocity_mps` so their projections
    /// cancel.
    pub fn canonical_four_arm(
        top_length_m: f64,
        side_length_m: f64,
        top_velocity_mps: f64,
        side_velocity_mps: [f64; 3],
        turns: u32,
    ) -> Result<Self> {
        let segments = vec![
            PathSegment::new(top_length_m, [1.0, 0.0, 0.0], [top_velocity_mps, 0.0, 0.0])?,
            PathSegment::new(side_length_m, [0.0, -1.0, 0.0], side_velocity_mps)?,
            PathSegment::new(top_length_m, [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0])?,
            PathSegment::new(side_length_m, [0.0, 1.0, 0.0], side_velocity_mps)?,
        ];
        Self::new(segments, turns)
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn turns(&self) -> u32 {
        self.turns
    }

    /// The same loop traversed the opposite way.
    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().map(PathSegment::reversed).collect(),
            turns: self.turns,
        }
    }
}

/// Optical parameters of the Sagnac readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SagnacConfig {
    /// Total moving-arm fiber length N*L, meters.
    pub nl_m: f64,
    /// Free-space central wavelength, meters.
    pub lambda0_m: f64,
    /// Speed of light, m/s. CODATA value unless overridden.
    pub c_mps: f64,
}

impl SagnacConfig {
    pub fn new(nl_m: f64, lambda0_m: f64) -> Result<Self> {
        Self {
            nl_m,
            lambda0_m,
            c_mps: SPEED_OF_LIGHT_M_PER_S,
        }
        .validated()
    }

    pub fn with_speed_of_light(mut self, c_mps: f64) -> Result<Self> {
        self.c_mps = c_mps;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        ensure_positive("nl_m", self.nl_m)?;
        ensure_positive("lambda0_m", self.lambda0_m)?;
        ensure_positive("c_mps", self.c_mps)?;
        Ok(self)
    }
}

/// Closed-form phase for the canonical geometry:
/// `phi = 4 pi v NL / (c lambda0)`. Linear in `v`, sign included.
pub fn phase_from_velocity(cfg: &SagnacConfig, velocity_mps: f64) -> f64 {
    4.0 * std::f64::consts::PI * velocity_mps * cfg.nl_m / (cfg.c_mps * cfg.lambda0_m)
}

/// Discretized path integral over an arbitrary loop geometry. Uses `cfg`
/// only for the wavelength and the speed of light; the loop supplies its
/// own lengths and turn count.
pub fn phase_from_path(geom: &LoopGeometry, cfg: &SagnacConfig) -> f64 {
    let line_integral: f64 = geom.segments().iter().map(PathSegment::contribution).sum();
    4.0 * std::f64::consts::PI * f64::from(geom.turns()) * line_integral
        / (cfg.c_mps * cfg.lambda0_m)
}
