//! Write-phase integration, storage decay and the read-out transient.

mod read;
mod rk4;
mod write;

pub use read::{
    damped_kernel, integrate_read, read_rates, sigma_read_closed, transient_kernel, ReadRates,
};
pub use write::{apply_storage, integrate_write, StoredGrating, WriteRun};

use crate::error::{Error, Result};

/// Durations of the write, storage and read windows, all in 1/Γ12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSequence {
    pub t_write: f64,
    pub t_store: f64,
    pub t_read: f64,
    /// Integrator step.
    pub dt: f64,
}

impl Default for TimeSequence {
    fn default() -> Self {
        TimeSequence {
            t_write: 50.0,
            // about 1 μs at Γ12 = 2π × 2.6 MHz
            t_store: 16.0,
            t_read: 400.0,
            dt: 0.01,
        }
    }
}

impl TimeSequence {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_write", self.t_write),
            ("t_read", self.t_read),
            ("dt", self.dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !(self.t_store.is_finite() && self.t_store >= 0.0) {
            return Err(Error::invalid("t_store", "must be >= 0"));
        }
        if self.dt > 0.1 {
            return Err(Error::invalid("dt", format!("must be <= 0.1/Γ12, got {}", self.dt)));
        }
        if self.dt > self.t_read / 100.0 {
            return Err(Error::invalid(
                "dt",
                format!("must be <= t_read/100 = {}, got {}", self.t_read / 100.0, self.dt),
            ));
        }
        Ok(())
    }
}

/// Sampled solution on a strictly increasing time grid (1/Γ12).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sequence_is_valid() {
        TimeSequence::default().validate().unwrap();
    }

    #[test]
    fn rejects_coarse_steps() {
        let seq = TimeSequence {
            dt: 0.2,
            ..Default::default()
        };
        assert!(seq.validate().is_err());
        let seq = TimeSequence {
            t_read: 5.0,
            dt: 0.1,
            ..Default::default()
        };
        assert!(seq.validate().is_err());
    }
}
