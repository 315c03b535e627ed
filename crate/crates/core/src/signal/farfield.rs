use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{sigma_read_closed, StoredGrating};
use crate::error::{Error, Result};
use crate::model::{AtomParams, SignalNormalization};

/// Gaussian atomic cloud, `η(r) = N (2πL²)^{-3/2} exp(−r²/2L²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudGeometry {
    pub n_atoms: f64,
    /// rms width L [m].
    pub rms_width: f64,
    /// Wavevector of W' [rad/m].
    pub k_wprime: [f64; 3],
}

impl CloudGeometry {
    pub fn validate(&self, wavelength: f64) -> Result<()> {
        if !(self.n_atoms.is_finite() && self.n_atoms > 0.0) {
            return Err(Error::invalid("n_atoms", "must be > 0"));
        }
        if !(self.rms_width.is_finite() && self.rms_width > 0.0) {
            return Err(Error::invalid("rms_width", "must be > 0"));
        }
        let k = norm3(&self.k_wprime);
        let expected = 2.0 * PI / wavelength;
        if (k / expected - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(
                "k_wprime",
                format!("|k| = {k} rad/m but 2π/λ = {expected} rad/m"),
            ));
        }
        Ok(())
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Complex D-field amplitude radiated into direction `k` at read time `t`,
/// `dipole_scale · N · σ_{2,1a}(t) · exp(−|k + k_W'|² L² / 2)`.
///
/// The optical carrier `e^{−iω t}` is dropped; `σ_{2,1a}` is the coherence at
/// the cloud centre.
pub fn farfield_amplitude(
    k: [f64; 3],
    t: f64,
    grating: &StoredGrating,
    omega_r: Complex64,
    cloud: &CloudGeometry,
    params: &AtomParams,
    norm: &SignalNormalization,
) -> Complex64 {
    let q = [
        k[0] + cloud.k_wprime[0],
        k[1] + cloud.k_wprime[1],
        k[2] + cloud.k_wprime[2],
    ];
    let q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    let envelope = (-0.5 * q2 * cloud.rms_width * cloud.rms_width).exp();
    let sigma = sigma_read_closed(grating, omega_r, params, t).conj();
    sigma * (norm.dipole_scale * cloud.n_atoms * envelope)
}

/// Period of the polarization grating written by two beams crossing at
/// `theta`, `λ / (2 sin(θ/2))`.
pub fn grating_period(wavelength: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::invalid("theta", format!("must lie in (0, π], got {theta}")));
    }
    if !(wavelength > 0.0) {
        return Err(Error::invalid("wavelength", "must be > 0"));
    }
    Ok(wavelength / (2.0 * (theta / 2.0).sin()))
}
