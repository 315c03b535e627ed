//! Simulation and analysis of a Zeeman coherence grating written into cold
//! three-level atoms by two crossed beams, stored, and read out by Bragg
//! diffraction of a third beam.
//!
//! Internal units: time in 1/Γ12, rates in Γ12, Rabi frequencies as Ω/Γ12.
//! See [`units`] for conversions to laboratory units.

pub mod dynamics;
pub mod error;
pub mod fit;
pub mod io;
pub mod model;
pub mod signal;
pub mod sweep;
pub mod units;

pub use error::{Error, ErrorKind, Result};
