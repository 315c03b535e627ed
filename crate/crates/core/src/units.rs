//! Physical constants and the conversion between laboratory units and the
//! internal ones.
//!
//! Internally every time is measured in units of 1/Γ12, every rate in units of
//! Γ12, and every field through the saturation parameter `x = I / (2 I_sat)`
//! so that `|Ω| / Γ12 = sqrt(x)`.

use std::f64::consts::PI;

/// Excited-state population decay rate of the Cs D2 line, Γ22 = 2π × 5.2 MHz.
pub const CS_D2_GAMMA22: f64 = 2.0 * PI * 5.2e6;

/// Cs D2 vacuum wavelength [m].
pub const CS_D2_WAVELENGTH: f64 = 852.347e-9;

/// Saturation intensity of the Cs D2 cycling transition [mW/cm²].
pub const CS_D2_CYCLING_I_SAT: f64 = 1.1049;

/// Saturation intensity of |F=3, m=+3⟩ → |F'=2, m'=+2⟩ [mW/cm²].
///
/// The cycling transition has relative strength 1/2, this one 5/14.
pub const I_SAT_B_DEFAULT: f64 = CS_D2_CYCLING_I_SAT * (1.0 / 2.0) / (5.0 / 14.0);

/// `I_sa / I_sb` for |F=3, m=+1⟩ → |F'=2, m'=+2⟩ against the m=+3 transition.
pub const I_SAT_RATIO_DEFAULT: f64 = 15.0;

/// Ground-coherence decay rate γ/Γ12 estimated from the storage-time data.
pub const GAMMA_RATIO_DEFAULT: f64 = 0.02;

/// γ/Γ12 that best reproduces the pulse-width data.
pub const GAMMA_RATIO_WIDTH_FIT: f64 = 0.014;

/// Read-intensity rescale factor `a`.
pub const READ_RESCALE_DEFAULT: f64 = 0.02;

/// Write-ratio rescale factor `a'`.
pub const WRITE_RATIO_RESCALE_DEFAULT: f64 = 1.9;

/// Angle between the two write beams [rad].
pub const WRITE_ANGLE_DEFAULT: f64 = 60e-3;

/// Converts microseconds into units of 1/Γ12.
pub fn us_to_internal(t_us: f64, gamma12: f64) -> f64 {
    t_us * 1e-6 * gamma12
}

/// Converts a time in units of 1/Γ12 into microseconds.
pub fn internal_to_us(t: f64, gamma12: f64) -> f64 {
    t / gamma12 * 1e6
}

/// Saturation parameter `I / (2 I_sat)`.
pub fn saturation_parameter(intensity: f64, i_sat: f64) -> f64 {
    intensity / (2.0 * i_sat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clebsch_gordan_ratio_gives_factor_fifteen() {
        // 5/14 against 1/42
        let i_sat_a = CS_D2_CYCLING_I_SAT * (1.0 / 2.0) / (1.0 / 42.0);
        assert!((i_sat_a / I_SAT_B_DEFAULT - I_SAT_RATIO_DEFAULT).abs() < 1e-12);
    }

    #[test]
    fn time_conversion_round_trips() {
        let g12 = CS_D2_GAMMA22 / 2.0;
        let t = us_to_internal(2.9, g12);
        assert!((internal_to_us(t, g12) - 2.9).abs() < 1e-12);
        // 1/Γ12 is about 61 ns
        assert!((internal_to_us(1.0, g12) - 0.0612).abs() < 1e-3);
    }
}
