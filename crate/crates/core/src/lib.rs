//! Simulation and design toolkit for a weak-value-amplified fiber-optic
//! linear-velocity sensor.
//!
//! A moving fiber arm imprints a generalized-Sagnac phase difference on the
//! counter-propagating polarization components of a broadband probe. Nearly
//! orthogonal pre/post-selection turns that phase into a large imaginary weak
//! value, which shifts the central wavelength of the post-selected spectrum
//! by an amount a spectrometer can resolve. The crate models every stage of
//! that chain and solves the inverse problem of picking the post-selection
//! angle and fiber length under source and detector constraints.
//!
//! Module map:
//!
//! - [`polarization`]: pre/post-selection states, the path observable and
//!   the weak value (closed form and raw-state cross-check).
//! - [`sagnac`]: phase difference from fiber motion, closed form and
//!   discretized path integral.
//! - [`spectrum`]: Gaussian probe synthesis, the post-selection tilt,
//!   symmetric dispersion and center extraction.
//! - [`instrument`]: spectrometer binning, detection limits and the
//!   classical intensity-readout baseline.
//! - [`design`]: forward sweeps and the constraint-driven design solver.
//! - [`exec`]: data-parallel map helpers behind the `parallel` feature.
//!
//! All operations are pure functions of their inputs; results do not depend
//! on thread count or execution order.

pub mod design;
pub mod error;
pub mod exec;
pub mod instrument;
pub mod polarization;
pub mod sagnac;
pub mod spectrum;

pub use error::{Error, Result};
