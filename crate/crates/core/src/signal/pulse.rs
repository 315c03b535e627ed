use num_complex::Complex64;

use super::{PulseTrace, TimeUnit};
use crate::dynamics::{damped_kernel, read_rates, ReadRates, StoredGrating};
use crate::error::{Error, Result};
use crate::model::{coherence_small_gamma, AtomParams, BeamSet, SignalNormalization};
use crate::units::saturation_parameter;

/// `|ρˢ_{1a,1b}|` in the small-γ limit for plane-wave write beams,
/// `sqrt(I_W I_W') e^{-γ t_s} / (I_W sqrt(I_sb/I_sa) + I_W' sqrt(I_sa/I_sb))`.
///
/// `gamma_g` and `t_store` only enter through their product.
pub fn stored_coherence_modulus(
    i_w: f64,
    i_wp: f64,
    i_sat_a: f64,
    i_sat_b: f64,
    gamma_g: f64,
    t_store: f64,
) -> Result<f64> {
    if !(i_w >= 0.0 && i_wp >= 0.0) {
        return Err(Error::invalid("i_w", "write intensities must be >= 0"));
    }
    if !(i_sat_a > 0.0 && i_sat_b > 0.0) {
        return Err(Error::invalid("i_sat_a", "saturation intensities must be > 0"));
    }
    let ratio = (i_sat_a / i_sat_b).sqrt();
    let denom = i_w / ratio + i_wp * ratio;
    if denom == 0.0 {
        return Err(Error::UndefinedCoherence("both write intensities are zero"));
    }
    Ok((i_w * i_wp).sqrt() * (-gamma_g * t_store).exp() / denom)
}

/// Stored grating predicted from the beam intensities (small-γ steady state
/// followed by storage decay), with the `a'` rescale applied to I_W.
pub fn stored_grating_from_beams(
    beams: &BeamSet,
    atom: &AtomParams,
    t_store: f64,
) -> Result<StoredGrating> {
    let rho_e = coherence_small_gamma(beams.omega_w(atom)?, beams.omega_wp(atom)?)?;
    let decay = (-atom.gamma_ratio() * t_store).exp();
    Ok(StoredGrating {
        rho_ab_s: rho_e * decay,
        t_store_applied: t_store,
    })
}

fn read_profile_rates(i_r: f64, i_sat_b: f64, params: &AtomParams) -> (f64, ReadRates) {
    let x = saturation_parameter(i_r, i_sat_b);
    let rates = read_rates(params, Complex64::new(x.sqrt(), 0.0));
    (x, rates)
}

/// Temporal profile of the D-field amplitude,
/// `f_R(t) = sqrt(I_R/2I_sb) e^{-γ1 t} g(γ2², t)` with t in 1/Γ12.
///
/// Signed: it changes sign when the read-out rings.
pub fn f_read_profile(t: f64, i_r: f64, i_sat_b: f64, params: &AtomParams) -> f64 {
    let (x, rates) = read_profile_rates(i_r, i_sat_b, params);
    x.sqrt() * damped_kernel(&rates, t)
}

/// Fast-detector signal `S_fast(t) = A' |ρˢ|² f_R(t)²`.
///
/// `i_r` is the intensity seen by the atoms (any `a` rescale already applied).
pub fn signal_fast(
    t: f64,
    grating: &StoredGrating,
    i_r: f64,
    params: &AtomParams,
    norm: &SignalNormalization,
) -> f64 {
    let f = f_read_profile(t, i_r, params.i_sat_b, params);
    norm.amp_const * grating.rho_ab_s.norm_sqr() * f * f
}

/// Closed-form `U_D = ∫₀^∞ S_fast dt` (time in 1/Γ12):
/// `A' |ρˢ|² x / (2 (1 + γ) (x + γ))` with `x = I_R / 2I_sb`.
pub fn pulse_energy_closed(
    grating: &StoredGrating,
    i_r: f64,
    params: &AtomParams,
    norm: &SignalNormalization,
) -> Result<f64> {
    let gamma = params.gamma_ratio();
    let x = saturation_parameter(i_r, params.i_sat_b);
    if x + gamma == 0.0 {
        return Err(Error::UndefinedCoherence(
            "energy undefined for γ = 0 with the read beam off",
        ));
    }
    Ok(norm.amp_const * grating.rho_ab_s.norm_sqr() * x / (2.0 * (1.0 + gamma) * (x + gamma)))
}

/// A window of `decay_times` slowest intensity-decay times of the pulse
/// (1/Γ12), i.e. `decay_times / (2 (γ1 − Re γ2))`.
pub fn pulse_window(i_r: f64, params: &AtomParams, decay_times: f64) -> f64 {
    let (_, rates) = read_profile_rates(i_r, params.i_sat_b, params);
    let slow = rates.gamma1 - rates.gamma2_sq.max(0.0).sqrt();
    decay_times / (2.0 * slow)
}

/// Samples `S_fast` on `[0, window]` with `n_steps` equal intervals.
pub fn sample_pulse(
    grating: &StoredGrating,
    i_r: f64,
    params: &AtomParams,
    norm: &SignalNormalization,
    window: f64,
    n_steps: usize,
) -> Result<PulseTrace> {
    if !(window > 0.0) || n_steps == 0 {
        return Err(Error::invalid("window", "needs a positive window and at least one step"));
    }
    let h = window / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 * h).collect();
    let values = times
        .iter()
        .map(|&t| signal_fast(t, grating, i_r, params, norm))
        .collect();
    Ok(PulseTrace::new(times, values, TimeUnit::Gamma12)?
        .with_param("i_r_effective_mw_per_cm2", i_r)
        .with_param("gamma_over_gamma12", params.gamma_ratio())
        .with_param("rho_s_modulus", grating.modulus()))
}
