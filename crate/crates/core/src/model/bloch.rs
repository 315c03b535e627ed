//! Optical Bloch right-hand sides on resonance, in the rotating frame.
//!
//! Time is in units of 1/Γ12 and Rabi frequencies are passed as Ω/Γ12.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::density::DensityMatrix3;
use super::params::AtomParams;

/// Time derivative of the state while both write beams are on.
///
/// W couples 1a ↔ 2, W' couples 1b ↔ 2.
pub fn bloch_rhs_write(
    state: &DensityMatrix3,
    omega_w: Complex64,
    omega_wp: Complex64,
    params: &AtomParams,
) -> DensityMatrix3 {
    let r = params.scaled();
    let drive_a = omega_w * state.sigma_a2;
    let drive_b = omega_wp * state.sigma_b2;

    DensityMatrix3 {
        rho22: 2.0 * (drive_a.re + drive_b.re) - r.gamma22 * state.rho22,
        rho_aa: -2.0 * drive_a.re + r.branch_a * state.rho22,
        rho_bb: -2.0 * drive_b.re + r.branch_b * state.rho22,
        sigma_a2: -omega_w.conj() * (state.rho22 - state.rho_aa) + omega_wp.conj() * state.rho_ab
            - state.sigma_a2,
        sigma_b2: -omega_wp.conj() * (state.rho22 - state.rho_bb)
            + omega_w.conj() * state.rho_ab.conj()
            - state.sigma_b2,
        rho_ab: -omega_w.conj() * state.sigma_b2.conj()
            - omega_wp * state.sigma_a2
            - r.gamma * state.rho_ab,
    }
}

/// The closed pair (σ_{1a,2}, ρ_{1a,1b}) driven during read-out.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReadState {
    pub sigma_a2: Complex64,
    pub rho_ab: Complex64,
}

impl ReadState {
    /// `|σ|² + |ρ|²`, which the read dynamics can only dissipate.
    pub fn norm_sqr(&self) -> f64 {
        self.sigma_a2.norm_sqr() + self.rho_ab.norm_sqr()
    }
}

impl Add for ReadState {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        ReadState {
            sigma_a2: self.sigma_a2 + o.sigma_a2,
            rho_ab: self.rho_ab + o.rho_ab,
        }
    }
}

impl Mul<f64> for ReadState {
    type Output = Self;

    fn mul(self, s: f64) -> Self {
        ReadState {
            sigma_a2: self.sigma_a2 * s,
            rho_ab: self.rho_ab * s,
        }
    }
}

/// Time derivatives `(dσ_{1a,2}/dt, dρ_{1a,1b}/dt)` with only R on.
pub fn bloch_rhs_read(
    sigma_a2: Complex64,
    rho_ab: Complex64,
    omega_r: Complex64,
    params: &AtomParams,
) -> (Complex64, Complex64) {
    let gamma = params.scaled().gamma;
    (
        omega_r.conj() * rho_ab - sigma_a2,
        -omega_r * sigma_a2 - gamma * rho_ab,
    )
}

pub(crate) fn read_rhs_state(s: &ReadState, omega_r: Complex64, params: &AtomParams) -> ReadState {
    let (sigma_a2, rho_ab) = bloch_rhs_read(s.sigma_a2, s.rho_ab, omega_r, params);
    ReadState { sigma_a2, rho_ab }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic_state() -> DensityMatrix3 {
        DensityMatrix3 {
            rho22: 0.12,
            rho_aa: 0.33,
            rho_bb: 0.55,
            sigma_a2: c(0.05, -0.08),
            sigma_b2: c(-0.02, 0.11),
            rho_ab: c(-0.21, 0.07),
        }
    }

    #[test]
    fn field_free_ground_mixture_is_stationary() {
        let d = bloch_rhs_write(
            &DensityMatrix3::ground_mixture(),
            Complex64::default(),
            Complex64::default(),
            &AtomParams::default(),
        );
        assert_eq!(d, DensityMatrix3::default());
    }

    #[test]
    fn spontaneous_decay_only() {
        let p = AtomParams::default();
        let d = bloch_rhs_write(
            &DensityMatrix3::excited(),
            Complex64::default(),
            Complex64::default(),
            &p,
        );
        let r = p.scaled();
        assert_eq!(d.rho22, -r.gamma22);
        assert_eq!(d.rho_aa, r.branch_a);
        assert_eq!(d.rho_bb, r.branch_b);
        assert_eq!(d.rho_ab, Complex64::default());
    }

    #[test]
    fn trace_derivative_is_the_branching_leak() {
        let p = AtomParams {
            branch_a: 0.3 * AtomParams::default().gamma22,
            branch_b: 0.5 * AtomParams::default().gamma22,
            ..AtomParams::default()
        };
        let s = generic_state();
        let d = bloch_rhs_write(&s, c(0.3, 0.4), c(-0.7, 0.2), &p);
        let r = p.scaled();
        let expected = (r.branch_a + r.branch_b - r.gamma22) * s.rho22;
        assert!((d.trace() - expected).abs() < 1e-15);

        let closed = bloch_rhs_write(&s, c(0.3, 0.4), c(-0.7, 0.2), &AtomParams::default());
        assert!(closed.trace().abs() < 1e-15);
    }

    #[test]
    fn conjugating_inputs_conjugates_outputs() {
        let p = AtomParams::default();
        let s = generic_state();
        let (w, wp) = (c(0.3, 0.4), c(-0.7, 0.2));
        let d = bloch_rhs_write(&s, w, wp, &p);
        let dc = bloch_rhs_write(&s.conj(), w.conj(), wp.conj(), &p);
        assert!(dc.max_abs_diff(&d.conj()) < 1e-15);
    }

    #[test]
    fn relabeling_ground_states_swaps_the_beams() {
        let p = AtomParams::default();
        let s = generic_state();
        let (w, wp) = (c(0.3, 0.4), c(-0.7, 0.2));
        let d = bloch_rhs_write(&s, w, wp, &p);
        let ds = bloch_rhs_write(&s.swap_ground(), wp, w, &p);
        assert!(ds.max_abs_diff(&d.swap_ground()) < 1e-15);
    }

    #[test]
    fn read_rhs_examples() {
        let p = AtomParams::default();
        let zero = Complex64::default();
        assert_eq!(bloch_rhs_read(zero, zero, c(0.5, 0.1), &p), (zero, zero));

        let rho0 = c(0.3, -0.2);
        let (ds, dr) = bloch_rhs_read(zero, rho0, zero, &p);
        assert_eq!(ds, zero);
        assert_eq!(dr, -p.gamma_ratio() * rho0);
    }

    #[test]
    fn read_rhs_matches_write_rhs_with_w_off() {
        // With W off and R on 1b ↔ 2, the (σ_a2, ρ_ab) rows of the full
        // system reduce to the read pair once σ_b2 and ρ22 vanish.
        let p = AtomParams::default();
        let s = DensityMatrix3 {
            rho22: 0.0,
            sigma_b2: Complex64::default(),
            ..generic_state()
        };
        let omega_r = c(0.2, 0.6);
        let full = bloch_rhs_write(&s, Complex64::default(), omega_r, &p);
        let (ds, dr) = bloch_rhs_read(s.sigma_a2, s.rho_ab, omega_r, &p);
        assert!((full.sigma_a2 - ds).norm() < 1e-15);
        assert!((full.rho_ab - dr).norm() < 1e-15);
    }
}
