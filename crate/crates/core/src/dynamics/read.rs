use num_complex::Complex64;

use super::rk4::{rk4_step, step_count};
use super::write::StoredGrating;
use super::{TimeSequence, Trajectory};
use crate::error::{Error, Result};
use crate::model::{read_rhs_state, AtomParams, ReadState};

/// Below this value of `|z| t²` the kernel uses its Taylor series.
const TAYLOR_THRESHOLD: f64 = 1e-6;

/// Rates of the read-out transient, in units of Γ12 (Γ12² for the square).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadRates {
    /// γ1 = (Γ12 + γ) / 2.
    pub gamma1: f64,
    /// γ2² = ((Γ12 − γ)² − 4|Ω_R|²) / 4; negative means the read-out rings.
    pub gamma2_sq: f64,
}

impl ReadRates {
    pub fn is_oscillatory(&self) -> bool {
        self.gamma2_sq < 0.0
    }
}

pub fn read_rates(params: &AtomParams, omega_r: Complex64) -> ReadRates {
    let gamma = params.scaled().gamma;
    ReadRates {
        gamma1: (1.0 + gamma) / 2.0,
        gamma2_sq: ((1.0 - gamma).powi(2) - 4.0 * omega_r.norm_sqr()) / 4.0,
    }
}

/// `g(z, t) = sinh(√z t)/√z`, continued analytically to `z ≤ 0`
/// (`t` at `z = 0`, `sin(√−z t)/√−z` below).
pub fn transient_kernel(z: f64, t: f64) -> f64 {
    let u = z * t * t;
    if u.abs() < TAYLOR_THRESHOLD {
        t * (1.0 + u / 6.0 + u * u / 120.0)
    } else if z > 0.0 {
        let s = z.sqrt();
        (s * t).sinh() / s
    } else {
        let s = (-z).sqrt();
        (s * t).sin() / s
    }
}

/// `e^{-γ1 t} g(γ2², t)`, evaluated without overflow for long windows.
pub fn damped_kernel(rates: &ReadRates, t: f64) -> f64 {
    let z = rates.gamma2_sq;
    if z > 0.0 && (z * t * t).abs() >= TAYLOR_THRESHOLD {
        // √z < γ1 always, so both exponents are negative
        let s = z.sqrt();
        (((s - rates.gamma1) * t).exp() - (-(s + rates.gamma1) * t).exp()) / (2.0 * s)
    } else {
        (-rates.gamma1 * t).exp() * transient_kernel(z, t)
    }
}

/// Closed-form optical coherence during read-out,
/// `σ_{1a,2}(t) = Ω_R* ρˢ e^{-γ1 t} g(γ2², t)`.
pub fn sigma_read_closed(
    grating: &StoredGrating,
    omega_r: Complex64,
    params: &AtomParams,
    t: f64,
) -> Complex64 {
    let rates = read_rates(params, omega_r);
    omega_r.conj() * grating.rho_ab_s * damped_kernel(&rates, t)
}

/// Fixed-step RK4 integration of the read pair over `[0, seq.t_read]`,
/// starting from `σ = 0`, `ρ = ρˢ`.
pub fn integrate_read(
    grating: &StoredGrating,
    omega_r: Complex64,
    params: &AtomParams,
    seq: &TimeSequence,
) -> Result<Trajectory<ReadState>> {
    params.validate()?;
    seq.validate()?;

    let n = step_count(seq.t_read, seq.dt);
    let h = seq.t_read / n as f64;
    let rhs = |s: &ReadState| read_rhs_state(s, omega_r, params);

    let init = ReadState {
        sigma_a2: Complex64::default(),
        rho_ab: grating.rho_ab_s,
    };
    let bound = init.norm_sqr() * (1.0 + 1e-8);

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(init);
    let mut y = init;
    for i in 1..=n {
        y = rk4_step(&rhs, y, h);
        let t = i as f64 * h;
        let norm = y.norm_sqr();
        if !norm.is_finite() || norm > bound {
            return Err(Error::IntegrationDiverged {
                time: t,
                detail: format!("|σ|² + |ρ|² grew from {} to {norm}", init.norm_sqr()),
            });
        }
        times.push(t);
        states.push(y);
    }
    Ok(Trajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grating() -> StoredGrating {
        StoredGrating::new(Complex64::new(-0.31, 0.12)).unwrap()
    }

    #[test]
    fn zero_field_rates() {
        let p = AtomParams::default().with_gamma_ratio(0.0);
        let r = read_rates(&p, Complex64::default());
        assert_eq!(r.gamma1, 0.5);
        assert_eq!(r.gamma2_sq.sqrt(), 0.5);
    }

    #[test]
    fn critical_and_oscillatory_rates() {
        let p = AtomParams::default();
        let g = p.gamma_ratio();
        let r = read_rates(&p, Complex64::new(0.0, (1.0 - g) / 2.0));
        assert!(r.gamma2_sq.abs() < 1e-16);

        let p0 = p.with_gamma_ratio(0.0);
        let r = read_rates(&p0, Complex64::new(0.0, 1.0));
        assert_eq!(r.gamma2_sq, -0.75);
        assert!(r.is_oscillatory());
        assert_eq!(r.gamma1, 0.5);
    }

    #[test]
    fn kernel_is_continuous_through_zero() {
        for &t in &[1e-3, 0.5, 7.0, 42.0, 100.0] {
            for &z in &[1e-14, -1e-14] {
                assert!((transient_kernel(z, t) - t).abs() <= 1e-9 * t);
            }
            for &z in &[1e-12f64, -1e-12] {
                let series = t * (1.0 + z * t * t / 6.0);
                assert!((transient_kernel(z, t) - series).abs() <= 1e-12 * t);
            }
            assert_eq!(transient_kernel(0.0, t), t);
        }
        // both sides of the Taylor threshold agree
        let t = 10.0;
        for &z in &[0.99e-8f64, 1.01e-8, -0.99e-8, -1.01e-8] {
            let exact = if z > 0.0 {
                (z.sqrt() * t).sinh() / z.sqrt()
            } else {
                ((-z).sqrt() * t).sin() / (-z).sqrt()
            };
            assert!((transient_kernel(z, t) - exact).abs() < 1e-14 * t);
        }
    }

    #[test]
    fn damped_kernel_survives_long_windows() {
        let p = AtomParams::default();
        let r = read_rates(&p, Complex64::new(0.0, 0.05));
        let v = damped_kernel(&r, 5e4);
        assert!(v.is_finite() && v >= 0.0);
        let direct = (-r.gamma1 * 30.0).exp() * transient_kernel(r.gamma2_sq, 30.0);
        assert!((damped_kernel(&r, 30.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn closed_form_starts_at_zero() {
        let p = AtomParams::default();
        assert_eq!(
            sigma_read_closed(&grating(), Complex64::new(0.0, 0.4), &p, 0.0),
            Complex64::default()
        );
    }

    #[test]
    fn closed_form_derivative_matches_read_rhs() {
        // differentiate the closed form by central differences and compare
        // with the right-hand side evaluated on the closed-form state
        let p = AtomParams::default();
        let g = grating();
        for &om in &[0.1, 0.49, 2.0] {
            let omega_r = Complex64::new(0.0, om);
            let rho = |t: f64| {
                // ρ(t) from σ via dσ/dt = Ω_R* ρ − σ
                let h = 1e-5;
                let ds = (sigma_read_closed(&g, omega_r, &p, t + h)
                    - sigma_read_closed(&g, omega_r, &p, t - h))
                    / (2.0 * h);
                (ds + sigma_read_closed(&g, omega_r, &p, t)) / omega_r.conj()
            };
            let t = 3.0;
            let h = 1e-3;
            let drho = (rho(t + h) - rho(t - h)) / (2.0 * h);
            let sigma = sigma_read_closed(&g, omega_r, &p, t);
            let expected = -omega_r * sigma - p.gamma_ratio() * rho(t);
            assert!((drho - expected).norm() < 1e-5, "Ω = {om}");
        }
    }

    #[test]
    fn zero_read_field_leaves_pure_decay() {
        let p = AtomParams::default();
        let seq = TimeSequence {
            t_read: 20.0,
            dt: 0.01,
            ..Default::default()
        };
        let g = grating();
        let tr = integrate_read(&g, Complex64::default(), &p, &seq).unwrap();
        for (t, s) in tr.iter() {
            assert_eq!(s.sigma_a2, Complex64::default());
            let expected = g.rho_ab_s * (-p.gamma_ratio() * t).exp();
            assert!((s.rho_ab - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn numeric_read_matches_closed_form() {
        let p = AtomParams::default();
        let seq = TimeSequence {
            t_read: 60.0,
            dt: 1e-3,
            ..Default::default()
        };
        let g = grating();
        for &om in &[0.1, 0.49, 1.0, 2.0] {
            let omega_r = Complex64::new(0.0, om);
            let tr = integrate_read(&g, omega_r, &p, &seq).unwrap();
            let scale = tr.states.iter().map(|s| s.sigma_a2.norm()).fold(0.0, f64::max);
            let err = tr
                .iter()
                .map(|(t, s)| (s.sigma_a2 - sigma_read_closed(&g, omega_r, &p, t)).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-8 * scale, "Ω = {om}: {err:e}");
        }
    }

    #[test]
    fn read_norm_never_grows() {
        let p = AtomParams::default();
        let seq = TimeSequence {
            t_read: 50.0,
            dt: 0.01,
            ..Default::default()
        };
        let tr = integrate_read(&grating(), Complex64::new(0.3, 0.7), &p, &seq).unwrap();
        let norms: Vec<f64> = tr.states.iter().map(|s| s.norm_sqr()).collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));

        // damped read-out: the ground coherence itself is drained monotonically
        let tr = integrate_read(&grating(), Complex64::new(0.0, 0.3), &p, &seq).unwrap();
        let rho: Vec<f64> = tr.states.iter().map(|s| s.rho_ab.norm()).collect();
        assert!(rho.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
