use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units;

/// Relaxation rates and saturation intensities of the three-level system.
///
/// Rates are angular frequencies [rad/s]; intensities are in mW/cm².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Optical-coherence decay rate Γ12.
    pub gamma12: f64,
    /// Excited-state population decay rate Γ22.
    pub gamma22: f64,
    /// Ground-state (Zeeman) coherence decay rate γ.
    pub gamma_g: f64,
    /// Decay rate of ρ22 into ρ_aa.
    pub branch_a: f64,
    /// Decay rate of ρ22 into ρ_bb.
    pub branch_b: f64,
    /// Saturation intensity of 1a → 2.
    pub i_sat_a: f64,
    /// Saturation intensity of 1b → 2.
    pub i_sat_b: f64,
}

impl Default for AtomParams {
    /// Cesium F=3 → F'=2 with Γ22 = 2Γ12, equal branching and γ/Γ12 = 0.02.
    fn default() -> Self {
        let gamma22 = units::CS_D2_GAMMA22;
        let gamma12 = gamma22 / 2.0;
        AtomParams {
            gamma12,
            gamma22,
            gamma_g: units::GAMMA_RATIO_DEFAULT * gamma12,
            branch_a: gamma22 / 2.0,
            branch_b: gamma22 / 2.0,
            i_sat_a: units::I_SAT_RATIO_DEFAULT * units::I_SAT_B_DEFAULT,
            i_sat_b: units::I_SAT_B_DEFAULT,
        }
    }
}

/// Rates expressed in units of Γ12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ScaledRates {
    pub gamma: f64,
    pub gamma22: f64,
    pub branch_a: f64,
    pub branch_b: f64,
}

impl AtomParams {
    /// Returns a copy with γ set to `ratio · Γ12`.
    pub fn with_gamma_ratio(mut self, ratio: f64) -> Self {
        self.gamma_g = ratio * self.gamma12;
        self
    }

    /// γ/Γ12.
    pub fn gamma_ratio(&self) -> f64 {
        self.gamma_g / self.gamma12
    }

    pub(crate) fn scaled(&self) -> ScaledRates {
        ScaledRates {
            gamma: self.gamma_g / self.gamma12,
            gamma22: self.gamma22 / self.gamma12,
            branch_a: self.branch_a / self.gamma12,
            branch_b: self.branch_b / self.gamma12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("gamma22", self.gamma22),
            ("gamma_g", self.gamma_g),
            ("branch_a", self.branch_a),
            ("branch_b", self.branch_b),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        let positive = [
            ("gamma12", self.gamma12),
            ("i_sat_a", self.i_sat_a),
            ("i_sat_b", self.i_sat_b),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let leak = self.branch_a + self.branch_b - self.gamma22;
        if leak.abs() > 1e-12 * self.gamma22.max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(
                "branch_a",
                format!(
                    "branch_a + branch_b must equal gamma22 (closed system), off by {leak:e} rad/s"
                ),
            ));
        }
        Ok(())
    }
}

/// Intensities and geometry of the write (W, W') and read (R) beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSet {
    /// Intensity of W (σ+, drives 1a → 2) [mW/cm²].
    pub i_w: f64,
    /// Intensity of W' (σ−, drives 1b → 2) [mW/cm²].
    pub i_wp: f64,
    /// Intensity of R (σ−, drives 1b → 2) [mW/cm²].
    pub i_r: f64,
    /// Angle between W and W' [rad].
    pub theta: f64,
    /// Wavelength [m].
    pub wavelength: f64,
    /// `a`: the read intensity enters the model as `a · i_r`.
    pub rescale_read: f64,
    /// `a'`: the write ratio enters the model as `a' · i_w / i_wp`.
    pub rescale_write_ratio: f64,
}

impl Default for BeamSet {
    fn default() -> Self {
        BeamSet {
            i_w: 5.0,
            i_wp: 1.5,
            i_r: 8.0,
            theta: units::WRITE_ANGLE_DEFAULT,
            wavelength: units::CS_D2_WAVELENGTH,
            rescale_read: 1.0,
            rescale_write_ratio: 1.0,
        }
    }
}

impl BeamSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("i_w", self.i_w), ("i_wp", self.i_wp), ("i_r", self.i_r)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("intensity must be >= 0, got {v}")));
            }
        }
        if !(self.theta > 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid(
                "theta",
                format!("must lie in (0, π/2), got {}", self.theta),
            ));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::invalid("wavelength", "must be > 0"));
        }
        for (name, v) in [
            ("rescale_read", self.rescale_read),
            ("rescale_write_ratio", self.rescale_write_ratio),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("rescale factor must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `a · I_R`.
    pub fn effective_read_intensity(&self) -> f64 {
        self.rescale_read * self.i_r
    }

    /// `a' · I_W`; with I_W' held fixed this rescales the ratio I_W/I_W'.
    pub fn effective_write_intensity(&self) -> f64 {
        self.rescale_write_ratio * self.i_w
    }

    pub fn omega_w(&self, atom: &AtomParams) -> Result<Complex64> {
        plane_wave_rabi(self.effective_write_intensity(), atom.i_sat_a)
    }

    pub fn omega_wp(&self, atom: &AtomParams) -> Result<Complex64> {
        plane_wave_rabi(self.i_wp, atom.i_sat_b)
    }

    pub fn omega_r(&self, atom: &AtomParams) -> Result<Complex64> {
        plane_wave_rabi(self.effective_read_intensity(), atom.i_sat_b)
    }

    /// Wavevector of W' [rad/m]; W propagates along +z and W' is tilted by θ
    /// in the x–z plane.
    pub fn k_wprime(&self) -> [f64; 3] {
        let k = 2.0 * std::f64::consts::PI / self.wavelength;
        [k * self.theta.sin(), 0.0, k * self.theta.cos()]
    }
}

/// Overall output scale of the detected signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalNormalization {
    /// A' in `S_fast = A' |ρˢ|² |f_R|²` (arbitrary detector units).
    pub amp_const: f64,
    /// Lumps the dipole moment, ε0 and (2π)^{3/2} prefactors of the far field.
    pub dipole_scale: f64,
}

impl Default for SignalNormalization {
    fn default() -> Self {
        SignalNormalization {
            amp_const: 1.0,
            dipole_scale: 1.0,
        }
    }
}

impl SignalNormalization {
    pub fn validate(&self) -> Result<()> {
        if !(self.amp_const.is_finite() && self.amp_const > 0.0) {
            return Err(Error::invalid("amp_const", "must be > 0"));
        }
        if !self.dipole_scale.is_finite() {
            return Err(Error::invalid("dipole_scale", "must be finite"));
        }
        Ok(())
    }
}

/// `|Ω| / Γ12 = sqrt(I / (2 I_sat))` for a plane wave.
pub fn rabi_ratio_from_intensity(intensity: f64, i_sat: f64) -> Result<f64> {
    if !(i_sat.is_finite() && i_sat > 0.0) {
        return Err(Error::invalid("i_sat", format!("must be > 0, got {i_sat}")));
    }
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid("intensity", format!("must be >= 0, got {intensity}")));
    }
    Ok(units::saturation_parameter(intensity, i_sat).sqrt())
}

/// Complex Rabi frequency (in units of Γ12) of a plane wave at the origin,
/// `Ω/Γ12 = i sqrt(I / 2 I_sat)`.
pub fn plane_wave_rabi(intensity: f64, i_sat: f64) -> Result<Complex64> {
    Ok(Complex64::new(0.0, rabi_ratio_from_intensity(intensity, i_sat)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabi_ratio_examples() {
        assert_eq!(rabi_ratio_from_intensity(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(rabi_ratio_from_intensity(2.0 * 1.7, 1.7).unwrap(), 1.0);
        assert_eq!(rabi_ratio_from_intensity(8.0, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn rabi_ratio_rejects_bad_saturation_intensity() {
        assert!(matches!(
            rabi_ratio_from_intensity(1.0, 0.0),
            Err(Error::InvalidParameter { name: "i_sat", .. })
        ));
        assert!(rabi_ratio_from_intensity(1.0, -2.0).is_err());
        assert!(rabi_ratio_from_intensity(-1.0, 2.0).is_err());
    }

    #[test]
    fn defaults_are_valid_and_closed() {
        let atom = AtomParams::default();
        atom.validate().unwrap();
        assert!((2.0 * atom.gamma12 - atom.gamma22).abs() < 1e-6);
        assert!((atom.i_sat_a / atom.i_sat_b - 15.0).abs() < 1e-12);
        assert!((atom.gamma_ratio() - 0.02).abs() < 1e-15);
        BeamSet::default().validate().unwrap();
    }

    #[test]
    fn open_system_is_rejected() {
        let atom = AtomParams {
            branch_a: 0.0,
            ..AtomParams::default()
        };
        assert!(atom.validate().is_err());
    }

    #[test]
    fn beam_validation() {
        let mut beams = BeamSet::default();
        beams.theta = 2.0;
        assert!(beams.validate().is_err());
        beams.theta = 0.06;
        beams.rescale_read = 0.0;
        assert!(beams.validate().is_err());
    }

    #[test]
    fn k_wprime_has_optical_magnitude() {
        let beams = BeamSet::default();
        let k = beams.k_wprime();
        let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        let expected = 2.0 * std::f64::consts::PI / beams.wavelength;
        assert!((norm / expected - 1.0).abs() < 1e-12);
    }
}
