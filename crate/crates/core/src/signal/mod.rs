//! Observables of the retrieved D field: detected pulse, energy, width,
//! peak, far-field pattern and grating period.

mod analysis;
mod farfield;
mod pulse;

pub use analysis::{pulse_energy_numeric, pulse_fwhm, pulse_peak, DetectorModel};
pub use farfield::{farfield_amplitude, grating_period, CloudGeometry};
pub use pulse::{
    f_read_profile, pulse_energy_closed, pulse_window, sample_pulse, signal_fast,
    stored_coherence_modulus, stored_grating_from_beams,
};

use crate::error::{Error, Result};

/// Unit of a trace's time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    /// Units of 1/Γ12.
    Gamma12,
    Microseconds,
}

/// A sampled detector signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrace {
    times: Vec<f64>,
    values: Vec<f64>,
    unit: TimeUnit,
    /// Parameters the trace was generated or recorded with.
    pub params: Vec<(String, f64)>,
}

impl PulseTrace {
    /// Builds a trace; times must be strictly increasing and values finite
    /// and non-negative.
    pub fn new(times: Vec<f64>, values: Vec<f64>, unit: TimeUnit) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(
                "values",
                format!("{} samples for {} times", values.len(), times.len()),
            ));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "times",
                format!("not strictly increasing at index {}", i + 1),
            ));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "values",
                format!("sample {i} is negative or non-finite"),
            ));
        }
        Ok(PulseTrace {
            times,
            values,
            unit,
            params: Vec::new(),
        })
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Re-expresses the time axis in `unit`, given Γ12 in rad/s.
    pub fn in_unit(&self, unit: TimeUnit, gamma12: f64) -> PulseTrace {
        let factor = match (self.unit, unit) {
            (a, b) if a == b => 1.0,
            (TimeUnit::Gamma12, TimeUnit::Microseconds) => 1e6 / gamma12,
            (TimeUnit::Microseconds, TimeUnit::Gamma12) => gamma12 * 1e-6,
            _ => unreachable!(),
        };
        PulseTrace {
            times: self.times.iter().map(|t| t * factor).collect(),
            values: self.values.clone(),
            unit,
            params: self.params.clone(),
        }
    }

    pub(crate) fn map_values(&self, values: Vec<f64>) -> PulseTrace {
        debug_assert_eq!(values.len(), self.values.len());
        PulseTrace {
            times: self.times.clone(),
            values,
            unit: self.unit,
            params: self.params.clone(),
        }
    }
}
