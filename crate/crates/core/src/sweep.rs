//! Parameter sweeps over read intensity, write intensity and storage time.
//!
//! Rows are evaluated independently on the rayon pool and returned in grid
//! order, so a sweep is bit-for-bit reproducible regardless of thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AtomParams, BeamSet, SignalNormalization};
use crate::signal::{
    pulse_energy_closed, pulse_energy_numeric, pulse_fwhm, pulse_peak, pulse_window,
    sample_pulse, stored_grating_from_beams, DetectorModel,
};

/// The swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    /// I_R [mW/cm²], before the `a` rescale.
    ReadIntensity,
    /// I_W [mW/cm²], before the `a'` rescale.
    WriteIntensity,
    /// t_s [1/Γ12].
    StorageTime,
}

impl SweptParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweptParameter::ReadIntensity => "read-intensity",
            SweptParameter::WriteIntensity => "write-intensity",
            SweptParameter::StorageTime => "storage-time",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "read-intensity" => Some(SweptParameter::ReadIntensity),
            "write-intensity" => Some(SweptParameter::WriteIntensity),
            "storage-time" => Some(SweptParameter::StorageTime),
            _ => None,
        }
    }
}

/// Everything held fixed while one parameter is swept.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub atom: AtomParams,
    pub beams: BeamSet,
    /// Storage time [1/Γ12].
    pub t_store: f64,
    /// Sampling step of the pulse traces [1/Γ12].
    pub dt: f64,
    /// Trace length in units of the slowest intensity-decay time.
    pub decay_windows: f64,
    pub norm: SignalNormalization,
    /// Detector response applied before width/peak extraction; `tau` in 1/Γ12.
    pub detector: Option<DetectorModel>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            atom: AtomParams::default(),
            beams: BeamSet::default(),
            t_store: 16.0,
            dt: 1e-3,
            decay_windows: 50.0,
            norm: SignalNormalization::default(),
            detector: None,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.atom.validate()?;
        self.beams.validate()?;
        self.norm.validate()?;
        if !(self.t_store.is_finite() && self.t_store >= 0.0) {
            return Err(Error::invalid("t_store", "must be >= 0"));
        }
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(Error::invalid("dt", "must lie in (0, 0.1]"));
        }
        if !(self.decay_windows >= 1.0) {
            return Err(Error::invalid("decay_windows", "must be >= 1"));
        }
        Ok(())
    }

    /// Key–value record of the fixed parameters, for output headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let a = &self.atom;
        let b = &self.beams;
        let mut out = vec![
            ("gamma12_rad_per_s", a.gamma12.to_string()),
            ("gamma22_rad_per_s", a.gamma22.to_string()),
            ("gamma_over_gamma12", a.gamma_ratio().to_string()),
            ("branch_a_rad_per_s", a.branch_a.to_string()),
            ("branch_b_rad_per_s", a.branch_b.to_string()),
            ("i_sat_a_mw_per_cm2", a.i_sat_a.to_string()),
            ("i_sat_b_mw_per_cm2", a.i_sat_b.to_string()),
            ("i_w_mw_per_cm2", b.i_w.to_string()),
            ("i_wp_mw_per_cm2", b.i_wp.to_string()),
            ("i_r_mw_per_cm2", b.i_r.to_string()),
            ("rescale_read", b.rescale_read.to_string()),
            ("rescale_write_ratio", b.rescale_write_ratio.to_string()),
            ("t_store_per_gamma12", self.t_store.to_string()),
            ("dt_per_gamma12", self.dt.to_string()),
            ("decay_windows", self.decay_windows.to_string()),
            ("amp_const", self.norm.amp_const.to_string()),
        ];
        if let Some(d) = &self.detector {
            out.push(("detector_tau_per_gamma12", d.tau.to_string()));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

/// Observables of one retrieved pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    /// FWHM [1/Γ12]; zero for a pulse that is identically zero.
    pub fwhm: f64,
    pub peak: f64,
    /// Closed-form energy.
    pub energy: f64,
    /// Trapezoidal energy of the sampled trace.
    pub energy_numeric: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweptParameter,
    pub rows: Vec<SweepRow>,
    pub fixed: Vec<(String, String)>,
}

impl SweepTable {
    pub fn column(&self, f: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Builds the pulse for `beams` after `t_store` and extracts its observables.
pub fn evaluate_pulse(scenario: &Scenario, beams: &BeamSet, t_store: f64) -> Result<SweepRow> {
    let atom = &scenario.atom;
    let i_r = beams.effective_read_intensity();
    let grating = match stored_grating_from_beams(beams, atom, t_store) {
        Ok(g) => g,
        // no write field, no grating
        Err(Error::UndefinedCoherence(_)) => crate::dynamics::StoredGrating {
            rho_ab_s: Default::default(),
            t_store_applied: t_store,
        },
        Err(e) => return Err(e),
    };
    let energy = if i_r == 0.0 {
        0.0
    } else {
        pulse_energy_closed(&grating, i_r, atom, &scenario.norm)?
    };

    let window = if i_r == 0.0 {
        1.0
    } else {
        pulse_window(i_r, atom, scenario.decay_windows)
    };
    let steps = (window / scenario.dt).ceil().max(2.0) as usize;
    let mut trace = sample_pulse(&grating, i_r, atom, &scenario.norm, window, steps)?;
    if let Some(det) = &scenario.detector {
        trace = det.apply(&trace);
    }
    let peak = pulse_peak(&trace)?;
    let fwhm = if peak > 0.0 { pulse_fwhm(&trace)? } else { 0.0 };
    Ok(SweepRow {
        param: 0.0,
        fwhm,
        peak,
        energy,
        energy_numeric: pulse_energy_numeric(&trace)?,
    })
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("grid", "values must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("grid", "values must be strictly increasing"));
    }
    Ok(())
}

fn run_sweep(
    parameter: SweptParameter,
    grid: &[f64],
    scenario: &Scenario,
    point: impl Fn(f64) -> (BeamSet, f64) + Sync,
) -> Result<SweepTable> {
    scenario.validate()?;
    validate_grid(grid)?;
    let results: Vec<Result<SweepRow>> = grid
        .par_iter()
        .map(|&v| {
            let (beams, t_store) = point(v);
            evaluate_pulse(scenario, &beams, t_store).map(|r| SweepRow { param: v, ..r })
        })
        .collect();
    let rows = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::SweepPoint {
                index,
                value: grid[index],
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        parameter,
        rows,
        fixed: scenario.describe(),
    })
}

/// Sweeps I_R (before the `a` rescale).
pub fn sweep_read_intensity(grid: &[f64], scenario: &Scenario) -> Result<SweepTable> {
    run_sweep(SweptParameter::ReadIntensity, grid, scenario, |v| {
        (
            BeamSet {
                i_r: v,
                ..scenario.beams
            },
            scenario.t_store,
        )
    })
}

/// Sweeps I_W (before the `a'` rescale).
pub fn sweep_write_intensity(grid: &[f64], scenario: &Scenario) -> Result<SweepTable> {
    run_sweep(SweptParameter::WriteIntensity, grid, scenario, |v| {
        (
            BeamSet {
                i_w: v,
                ..scenario.beams
            },
            scenario.t_store,
        )
    })
}

/// Sweeps the storage time t_s [1/Γ12].
pub fn sweep_storage_time(grid: &[f64], scenario: &Scenario) -> Result<SweepTable> {
    run_sweep(SweptParameter::StorageTime, grid, scenario, |v| (scenario.beams, v))
}

/// Evenly spaced grid with `n` points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units;

    fn quick() -> Scenario {
        Scenario {
            dt: 0.01,
            decay_windows: 20.0,
            ..Default::default()
        }
    }

    #[test]
    fn zero_read_intensity_row() {
        let t = sweep_read_intensity(&[0.0], &quick()).unwrap();
        let r = t.rows[0];
        assert_eq!((r.energy, r.energy_numeric, r.peak, r.fwhm), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn zero_write_intensity_row() {
        let t = sweep_write_intensity(&[0.0, 1.0], &quick()).unwrap();
        let r = t.rows[0];
        assert_eq!((r.energy, r.energy_numeric, r.peak, r.fwhm), (0.0, 0.0, 0.0, 0.0));
        assert!(t.rows[1].energy > 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(sweep_read_intensity(&[], &quick()).is_err());
        assert!(sweep_read_intensity(&[1.0, 1.0], &quick()).is_err());
        assert!(sweep_read_intensity(&[2.0, 1.0], &quick()).is_err());
    }

    #[test]
    fn coarse_rows_equal_fine_rows() {
        let s = quick();
        let fine = linear_grid(1.0, 9.0, 9);
        let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();
        let tf = sweep_read_intensity(&fine, &s).unwrap();
        let tc = sweep_read_intensity(&coarse, &s).unwrap();
        for (rc, rf) in tc.rows.iter().zip(tf.rows.iter().step_by(2)) {
            assert_eq!(rc, rf);
        }
    }

    #[test]
    fn storage_sweep_starts_at_unit_normalized_peak() {
        let s = Scenario {
            atom: AtomParams::default().with_gamma_ratio(units::GAMMA_RATIO_WIDTH_FIT),
            ..quick()
        };
        let g = s.atom.gamma_ratio();
        let t = sweep_storage_time(&[0.0, 1.0 / (2.0 * g)], &s).unwrap();
        let p = t.column(|r| r.peak);
        assert!((p[1] / p[0] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn describe_lists_fixed_parameters() {
        let d = quick().describe();
        assert!(d.iter().any(|(k, _)| k == "gamma_over_gamma12"));
    }

    #[test]
    fn names_round_trip() {
        for p in [
            SweptParameter::ReadIntensity,
            SweptParameter::WriteIntensity,
            SweptParameter::StorageTime,
        ] {
            assert_eq!(SweptParameter::from_name(p.name()), Some(p));
        }
    }
}
