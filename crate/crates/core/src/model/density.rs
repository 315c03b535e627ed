use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// The six independent elements of the three-level density matrix.
///
/// Optical coherences are in the frame rotating with the drive, so
/// `sigma_a2 = ρ_{1a,2} e^{-iωt}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityMatrix3 {
    pub rho22: f64,
    pub rho_aa: f64,
    pub rho_bb: f64,
    pub sigma_a2: Complex64,
    pub sigma_b2: Complex64,
    pub rho_ab: Complex64,
}

impl DensityMatrix3 {
    /// Unpolarized ground manifold, ρ_aa = ρ_bb = ½.
    pub fn ground_mixture() -> Self {
        DensityMatrix3 {
            rho_aa: 0.5,
            rho_bb: 0.5,
            ..Default::default()
        }
    }

    pub fn excited() -> Self {
        DensityMatrix3 {
            rho22: 1.0,
            ..Default::default()
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho22 + self.rho_aa + self.rho_bb
    }

    /// Largest violation of the 2×2 principal-minor conditions
    /// (`|ρ_ij|² ≤ ρ_ii ρ_jj`); zero or negative means none.
    pub fn positivity_violation(&self) -> f64 {
        let ab = self.rho_ab.norm_sqr() - self.rho_aa * self.rho_bb;
        let a2 = self.sigma_a2.norm_sqr() - self.rho_aa * self.rho22;
        let b2 = self.sigma_b2.norm_sqr() - self.rho_bb * self.rho22;
        ab.max(a2).max(b2)
    }

    /// Distance by which a population leaves [0, 1]; zero when all are inside.
    pub fn population_excursion(&self) -> f64 {
        [self.rho22, self.rho_aa, self.rho_bb]
            .iter()
            .map(|&p| (-p).max(p - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> Self {
        DensityMatrix3 {
            sigma_a2: self.sigma_a2.conj(),
            sigma_b2: self.sigma_b2.conj(),
            rho_ab: self.rho_ab.conj(),
            ..*self
        }
    }

    /// Relabels the ground states, 1a ↔ 1b.
    pub fn swap_ground(&self) -> Self {
        DensityMatrix3 {
            rho22: self.rho22,
            rho_aa: self.rho_bb,
            rho_bb: self.rho_aa,
            sigma_a2: self.sigma_b2,
            sigma_b2: self.sigma_a2,
            rho_ab: self.rho_ab.conj(),
        }
    }

    /// Largest element-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = *self - *other;
        [
            d.rho22.abs(),
            d.rho_aa.abs(),
            d.rho_bb.abs(),
            d.sigma_a2.norm(),
            d.sigma_b2.norm(),
            d.rho_ab.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.rho22.is_finite()
            && self.rho_aa.is_finite()
            && self.rho_bb.is_finite()
            && self.sigma_a2.is_finite()
            && self.sigma_b2.is_finite()
            && self.rho_ab.is_finite()
    }
}

impl Add for DensityMatrix3 {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        DensityMatrix3 {
            rho22: self.rho22 + o.rho22,
            rho_aa: self.rho_aa + o.rho_aa,
            rho_bb: self.rho_bb + o.rho_bb,
            sigma_a2: self.sigma_a2 + o.sigma_a2,
            sigma_b2: self.sigma_b2 + o.sigma_b2,
            rho_ab: self.rho_ab + o.rho_ab,
        }
    }
}

impl Sub for DensityMatrix3 {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for DensityMatrix3 {
    type Output = Self;

    fn mul(self, s: f64) -> Self {
        DensityMatrix3 {
            rho22: self.rho22 * s,
            rho_aa: self.rho_aa * s,
            rho_bb: self.rho_bb * s,
            sigma_a2: self.sigma_a2 * s,
            sigma_b2: self.sigma_b2 * s,
            rho_ab: self.rho_ab * s,
        }
    }
}
