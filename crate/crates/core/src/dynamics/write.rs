use log::warn;
use num_complex::Complex64;

use super::rk4::{rk4_step, step_count};
use super::{TimeSequence, Trajectory};
use crate::error::{Error, Result};
use crate::model::{bloch_rhs_write, steady_state_write, AtomParams, DensityMatrix3};

/// Allowed trace drift and population excursion during integration.
const INVARIANT_TOL: f64 = 1e-8;

/// Output of [`integrate_write`].
#[derive(Debug, Clone)]
pub struct WriteRun {
    pub trajectory: Trajectory<DensityMatrix3>,
    /// Element-wise max distance of the final state to the linear-solve
    /// steady state; `None` when that steady state is not unique.
    pub steady_distance: Option<f64>,
}

impl WriteRun {
    pub fn final_state(&self) -> DensityMatrix3 {
        *self
            .trajectory
            .last()
            .expect("write trajectories hold at least the initial state")
    }
}

fn check_invariants(state: &DensityMatrix3, time: f64) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::IntegrationDiverged {
            time,
            detail: "non-finite density-matrix element".into(),
        });
    }
    let drift = (state.trace() - 1.0).abs();
    if drift > INVARIANT_TOL {
        return Err(Error::IntegrationDiverged {
            time,
            detail: format!("trace drifted by {drift:e}"),
        });
    }
    let excursion = state.population_excursion();
    if excursion > INVARIANT_TOL {
        return Err(Error::IntegrationDiverged {
            time,
            detail: format!("population left [0, 1] by {excursion:e}"),
        });
    }
    Ok(())
}

/// Integrates the write-phase Bloch equations over `[0, seq.t_write]` with
/// fixed-step RK4.
pub fn integrate_write(
    params: &AtomParams,
    omega_w: Complex64,
    omega_wp: Complex64,
    seq: &TimeSequence,
    init: DensityMatrix3,
) -> Result<WriteRun> {
    params.validate()?;
    seq.validate()?;
    check_invariants(&init, 0.0).map_err(|_| {
        Error::invalid(
            "init",
            "initial state must have unit trace and populations in [0, 1]",
        )
    })?;

    let n = step_count(seq.t_write, seq.dt);
    let h = seq.t_write / n as f64;
    let rhs = |s: &DensityMatrix3| bloch_rhs_write(s, omega_w, omega_wp, params);

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(init);
    let mut y = init;
    for i in 1..=n {
        y = rk4_step(&rhs, y, h);
        let t = i as f64 * h;
        check_invariants(&y, t)?;
        times.push(t);
        states.push(y);
    }

    let steady_distance = steady_state_write(params, omega_w, omega_wp)
        .ok()
        .map(|s| s.max_abs_diff(&y));
    Ok(WriteRun {
        trajectory: Trajectory { times, states },
        steady_distance,
    })
}

/// Ground coherence left in the sample after the write beams are switched
/// off and a storage interval has elapsed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoredGrating {
    /// ρˢ_{1a,1b}.
    pub rho_ab_s: Complex64,
    /// Storage time already folded into `rho_ab_s` (1/Γ12).
    pub t_store_applied: f64,
}

impl StoredGrating {
    /// A grating holding `rho_ab_s` with no storage time applied.
    pub fn new(rho_ab_s: Complex64) -> Result<Self> {
        if !rho_ab_s.is_finite() || rho_ab_s.norm() > 0.5 + 1e-12 {
            return Err(Error::invalid(
                "rho_ab_s",
                format!("stored coherence modulus must be <= 1/2, got {}", rho_ab_s.norm()),
            ));
        }
        Ok(StoredGrating {
            rho_ab_s,
            t_store_applied: 0.0,
        })
    }

    pub fn modulus(&self) -> f64 {
        self.rho_ab_s.norm()
    }
}

/// Free decay of the steady state over `t_store`: optical coherences are
/// dropped and the ground coherence decays as `e^{-γ t_store}`.
///
/// Only meaningful for `t_store ≫ 1/Γ12`; shorter times are logged.
pub fn apply_storage(steady: &DensityMatrix3, t_store: f64, params: &AtomParams) -> StoredGrating {
    if t_store < 5.0 {
        warn!(
            "storage time {t_store}/Γ12 is short; optical coherences have not decayed \
             and the stored-state approximation is poor"
        );
    }
    let gamma = params.scaled().gamma;
    StoredGrating {
        rho_ab_s: steady.rho_ab * (-gamma * t_store).exp(),
        t_store_applied: t_store,
    }
}
