//! Stationary state of the write phase.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::bloch::bloch_rhs_write;
use super::density::DensityMatrix3;
use super::params::AtomParams;
use crate::error::{Error, Result};

type Mat8 = SMatrix<f64, 8, 8>;
type Vec8 = SVector<f64, 8>;

/// Relative singular-value threshold below which the system is singular.
const RANK_TOL: f64 = 1e-12;

// Unknowns: ρ22, ρ_aa, Re/Im σ_a2, Re/Im σ_b2, Re/Im ρ_ab.
// ρ_bb = 1 − ρ22 − ρ_aa carries the trace constraint, so the ρ_bb equation
// is dropped.
fn unpack(x: &Vec8) -> DensityMatrix3 {
    DensityMatrix3 {
        rho22: x[0],
        rho_aa: x[1],
        rho_bb: 1.0 - x[0] - x[1],
        sigma_a2: Complex64::new(x[2], x[3]),
        sigma_b2: Complex64::new(x[4], x[5]),
        rho_ab: Complex64::new(x[6], x[7]),
    }
}

fn residual(d: &DensityMatrix3) -> Vec8 {
    Vec8::from([
        d.rho22,
        d.rho_aa,
        d.sigma_a2.re,
        d.sigma_a2.im,
        d.sigma_b2.re,
        d.sigma_b2.im,
        d.rho_ab.re,
        d.rho_ab.im,
    ])
}

/// Builds `M x + b` for the (affine) stationary equations.
fn linear_system(
    params: &AtomParams,
    omega_w: Complex64,
    omega_wp: Complex64,
) -> (Mat8, Vec8) {
    let eval = |x: &Vec8| residual(&bloch_rhs_write(&unpack(x), omega_w, omega_wp, params));
    let offset = eval(&Vec8::zeros());
    let mut m = Mat8::zeros();
    for j in 0..8 {
        let mut e = Vec8::zeros();
        e[j] = 1.0;
        m.set_column(j, &(eval(&e) - offset));
    }
    (m, offset)
}

/// Solves `d/dt ρ = 0` together with `Tr ρ = 1`.
///
/// Fails with [`Error::DegenerateSteadyState`] when the stationary state is
/// not unique, which happens when both write fields vanish.
pub fn steady_state_write(
    params: &AtomParams,
    omega_w: Complex64,
    omega_wp: Complex64,
) -> Result<DensityMatrix3> {
    params.validate()?;
    let (m, b) = linear_system(params, omega_w, omega_wp);

    let sv = m.singular_values();
    let smax = sv.max();
    let nullity = sv.iter().filter(|&&s| s <= RANK_TOL * smax).count();
    if nullity > 0 || smax == 0.0 {
        return Err(Error::DegenerateSteadyState {
            nullity: nullity.max(1),
        });
    }

    let x = m
        .lu()
        .solve(&(-b))
        .ok_or(Error::DegenerateSteadyState { nullity: 1 })?;
    Ok(unpack(&x))
}

/// Closed-form stationary ground coherence ρᵉ_{1a,1b}.
///
/// With `D = Γ'_a |Ω_W'|² + Γ'_b |Ω_W|²`,
/// `ρᵉ = −D Ω_W* Ω_W' / (D (γ + |Ω_W|² + |Ω_W'|²) + 6 γ |Ω_W|² |Ω_W'|²)`,
/// all rates in units of Γ12. Exact for Γ22 = 2Γ12.
pub fn coherence_steady_closed(
    params: &AtomParams,
    omega_w: Complex64,
    omega_wp: Complex64,
) -> Result<Complex64> {
    let r = params.scaled();
    let (pw, pwp) = (omega_w.norm_sqr(), omega_wp.norm_sqr());
    let weight = r.branch_a * pwp + r.branch_b * pw;
    let denom = weight * (r.gamma + pw + pwp) + 6.0 * r.gamma * pw * pwp;
    if denom == 0.0 {
        return Err(Error::UndefinedCoherence(
            "both write fields are zero (denominator A vanishes)",
        ));
    }
    Ok(-omega_w.conj() * omega_wp * (weight / denom))
}

/// The γ → 0 limit, `ρᵉ = −Ω_W* Ω_W' / (|Ω_W|² + |Ω_W'|²)`.
pub fn coherence_small_gamma(omega_w: Complex64, omega_wp: Complex64) -> Result<Complex64> {
    let denom = omega_w.norm_sqr() + omega_wp.norm_sqr();
    if denom == 0.0 {
        return Err(Error::UndefinedCoherence("both write fields are zero"));
    }
    Ok(-omega_w.conj() * omega_wp / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::plane_wave_rabi;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_field_pumps_into_dark_state() {
        let p = AtomParams::default();
        let s = steady_state_write(&p, c(0.0, 0.8), Complex64::default()).unwrap();
        assert!((s.rho_bb - 1.0).abs() < 1e-12);
        assert!(s.rho_aa.abs() < 1e-12 && s.rho22.abs() < 1e-12);
        assert!(s.rho_ab.norm() < 1e-12);
    }

    #[test]
    fn field_free_steady_state_is_degenerate() {
        let p = AtomParams::default();
        let err = steady_state_write(&p, Complex64::default(), Complex64::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSteadyState { nullity: 1 }));

        let p0 = p.with_gamma_ratio(0.0);
        let err = steady_state_write(&p0, Complex64::default(), Complex64::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateSteadyState { nullity: 3 }));
    }

    #[test]
    fn tiny_gamma_matches_small_gamma_limit() {
        let p = AtomParams::default().with_gamma_ratio(1e-8);
        let (w, wp) = (c(0.0, 0.4), c(0.3, 0.9));
        let s = steady_state_write(&p, w, wp).unwrap();
        let lim = coherence_small_gamma(w, wp).unwrap();
        assert!((s.rho_ab - lim).norm() < 1e-7);
    }

    #[test]
    fn reference_intensities_agree_with_closed_form() {
        let p = AtomParams::default();
        let w = plane_wave_rabi(5.0, p.i_sat_a).unwrap();
        let wp = plane_wave_rabi(1.5, p.i_sat_b).unwrap();
        let s = steady_state_write(&p, w, wp).unwrap();
        let closed = coherence_steady_closed(&p, w, wp).unwrap();
        assert!((s.rho_ab - closed).norm() <= 1e-12 * closed.norm());
        assert!(s.trace() == 1.0 || (s.trace() - 1.0).abs() < 1e-15);
        assert!(s.positivity_violation() < 1e-12);
    }

    #[test]
    fn symmetric_zero_gamma_coherence() {
        let p = AtomParams::default().with_gamma_ratio(0.0);
        let (w, wp) = (c(0.0, 0.7), 0.7 * Complex64::from_polar(1.0, 0.4));
        let rho = coherence_steady_closed(&p, w, wp).unwrap();
        assert!((rho.norm() - 0.5).abs() < 1e-15);
        let expected_phase = (w.conj() * wp).arg() + PI;
        let dphi = (rho.arg() - expected_phase).rem_euclid(2.0 * PI);
        assert!(dphi.min(2.0 * PI - dphi) < 1e-12);
    }

    #[test]
    fn numerator_vanishes_without_w_prime() {
        let p = AtomParams::default();
        let rho = coherence_steady_closed(&p, c(0.0, 1.0), Complex64::default()).unwrap();
        assert_eq!(rho.norm(), 0.0);
        assert!(coherence_steady_closed(&p, Complex64::default(), Complex64::default()).is_err());
    }

    #[test]
    fn approaches_small_gamma_limit_monotonically() {
        let (w, wp) = (c(0.0, 0.5), c(0.0, 1.3));
        let lim = coherence_small_gamma(w, wp).unwrap();
        let errs: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&g| {
                let p = AtomParams::default().with_gamma_ratio(g);
                (coherence_steady_closed(&p, w, wp).unwrap() - lim).norm()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 1e-5);
    }
}
