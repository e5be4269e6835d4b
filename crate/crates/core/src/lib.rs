//! Zero-temperature spin-boson qubit under second-order time-convolutionless
//! master equations: coefficients, dynamics, Kraus certification and the
//! trace-distance non-Markovianity measure.
//!
//! Frequencies are measured in units of the qubit splitting, times in units
//! of its inverse.

pub mod chimap;
pub mod dynamics;
pub mod error;
pub mod measure;
pub mod mat2;
mod num;
pub mod ode;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod toolcli;

pub use error::{Error, Result};

/// Qubit level splitting; the unit of frequency throughout.
pub const OMEGA_A: f64 = 1.0;
