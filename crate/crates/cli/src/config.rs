//! Run configuration: a TOML file with one table per block and the unit of
//! every quantity spelled out in its key.
//!
//! ```toml
//! [atom]
//! gamma22_mhz = 5.2
//! gamma_ratio = 0.014
//!
//! [beams]
//! i_r_mw_per_cm2 = 9.0
//! rescale_read = 0.02
//!
//! [sequence]
//! t_store_us = 1.0
//! ```
//!
//! Omitted keys and tables take their defaults.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gratingsim::dynamics::TimeSequence;
use gratingsim::model::{AtomParams, BeamSet, SignalNormalization};
use gratingsim::signal::{CloudGeometry, DetectorModel};
use gratingsim::sweep::Scenario;
use gratingsim::units;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    /// Γ22/2π.
    pub gamma22_mhz: f64,
    /// Γ12/2π; half of Γ22 when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma12_mhz: Option<f64>,
    /// γ/Γ12.
    pub gamma_ratio: f64,
    /// Fraction of the excited-state decay that ends in 1a.
    pub branch_a_fraction: f64,
    pub i_sat_a_mw_per_cm2: f64,
    pub i_sat_b_mw_per_cm2: f64,
}

impl Default for AtomSection {
    fn default() -> Self {
        AtomSection {
            gamma22_mhz: 5.2,
            gamma12_mhz: None,
            gamma_ratio: units::GAMMA_RATIO_DEFAULT,
            branch_a_fraction: 0.5,
            i_sat_a_mw_per_cm2: units::I_SAT_RATIO_DEFAULT * units::I_SAT_B_DEFAULT,
            i_sat_b_mw_per_cm2: units::I_SAT_B_DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamsSection {
    pub i_w_mw_per_cm2: f64,
    pub i_wp_mw_per_cm2: f64,
    pub i_r_mw_per_cm2: f64,
    pub theta_mrad: f64,
    pub wavelength_nm: f64,
    pub rescale_read: f64,
    pub rescale_write_ratio: f64,
}

impl Default for BeamsSection {
    fn default() -> Self {
        let b = BeamSet::default();
        BeamsSection {
            i_w_mw_per_cm2: b.i_w,
            i_wp_mw_per_cm2: b.i_wp,
            i_r_mw_per_cm2: b.i_r,
            theta_mrad: b.theta * 1e3,
            wavelength_nm: b.wavelength * 1e9,
            rescale_read: b.rescale_read,
            rescale_write_ratio: b.rescale_write_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceSection {
    pub t_write_us: f64,
    pub t_store_us: f64,
    pub t_read_us: f64,
    pub dt_us: f64,
}

impl Default for SequenceSection {
    fn default() -> Self {
        SequenceSection {
            t_write_us: 3.0,
            t_store_us: 1.0,
            t_read_us: 25.0,
            dt_us: 5e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CloudSection {
    pub n_atoms: f64,
    pub rms_width_um: f64,
}

impl Default for CloudSection {
    fn default() -> Self {
        CloudSection {
            n_atoms: 1e7,
            rms_width_um: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationSection {
    pub amp_const: f64,
    pub dipole_scale: f64,
}

impl Default for NormalizationSection {
    fn default() -> Self {
        NormalizationSection {
            amp_const: 1.0,
            dipole_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub tau_us: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection { tau_us: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    /// Standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            format: Format::Csv,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub beams: BeamsSection,
    pub sequence: SequenceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cloud: Option<CloudSection>,
    pub normalization: NormalizationSection,
    /// Detector low-pass; off when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorSection>,
    pub output: OutputSection,
}

fn check(ok: bool, field: &str, constraint: &str, value: f64) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{field}` {constraint}, got {value}"
        )))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn atom(&self) -> Result<AtomParams, CliError> {
        let a = &self.atom;
        check(a.gamma22_mhz > 0.0 && a.gamma22_mhz.is_finite(), "atom.gamma22_mhz", "must be > 0", a.gamma22_mhz)?;
        let g12_mhz = a.gamma12_mhz.unwrap_or(a.gamma22_mhz / 2.0);
        check(g12_mhz > 0.0 && g12_mhz.is_finite(), "atom.gamma12_mhz", "must be > 0", g12_mhz)?;
        check(a.gamma_ratio >= 0.0 && a.gamma_ratio.is_finite(), "atom.gamma_ratio", "must be >= 0", a.gamma_ratio)?;
        check(
            (0.0..=1.0).contains(&a.branch_a_fraction),
            "atom.branch_a_fraction",
            "must lie in [0, 1]",
            a.branch_a_fraction,
        )?;
        check(a.i_sat_a_mw_per_cm2 > 0.0, "atom.i_sat_a_mw_per_cm2", "must be > 0", a.i_sat_a_mw_per_cm2)?;
        check(a.i_sat_b_mw_per_cm2 > 0.0, "atom.i_sat_b_mw_per_cm2", "must be > 0", a.i_sat_b_mw_per_cm2)?;
        let gamma22 = 2.0 * PI * (a.gamma22_mhz * 1e6);
        let gamma12 = match a.gamma12_mhz {
            Some(m) => 2.0 * PI * (m * 1e6),
            None => gamma22 / 2.0,
        };
        let p = AtomParams {
            gamma12,
            gamma22,
            gamma_g: a.gamma_ratio * gamma12,
            branch_a: a.branch_a_fraction * gamma22,
            branch_b: (1.0 - a.branch_a_fraction) * gamma22,
            i_sat_a: a.i_sat_a_mw_per_cm2,
            i_sat_b: a.i_sat_b_mw_per_cm2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn beams(&self) -> Result<BeamSet, CliError> {
        let b = &self.beams;
        let beams = BeamSet {
            i_w: b.i_w_mw_per_cm2,
            i_wp: b.i_wp_mw_per_cm2,
            i_r: b.i_r_mw_per_cm2,
            theta: b.theta_mrad * 1e-3,
            wavelength: b.wavelength_nm * 1e-9,
            rescale_read: b.rescale_read,
            rescale_write_ratio: b.rescale_write_ratio,
        };
        beams.validate()?;
        Ok(beams)
    }

    /// Time sequence in units of 1/Γ12.
    pub fn sequence(&self, atom: &AtomParams) -> Result<TimeSequence, CliError> {
        let s = &self.sequence;
        let g = atom.gamma12;
        let seq = TimeSequence {
            t_write: units::us_to_internal(s.t_write_us, g),
            t_store: units::us_to_internal(s.t_store_us, g),
            t_read: units::us_to_internal(s.t_read_us, g),
            dt: units::us_to_internal(s.dt_us, g),
        };
        seq.validate().map_err(|e| {
            CliError::Config(format!(
                "[sequence]: {e} (times here are in 1/Γ12; 1 μs = {:.3}/Γ12)",
                units::us_to_internal(1.0, g)
            ))
        })?;
        Ok(seq)
    }

    pub fn normalization(&self) -> Result<SignalNormalization, CliError> {
        let n = SignalNormalization {
            amp_const: self.normalization.amp_const,
            dipole_scale: self.normalization.dipole_scale,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn detector(&self, atom: &AtomParams) -> Result<Option<DetectorModel>, CliError> {
        self.detector
            .as_ref()
            .map(|d| {
                check(d.tau_us > 0.0, "detector.tau_us", "must be > 0", d.tau_us)?;
                Ok(DetectorModel::new(units::us_to_internal(d.tau_us, atom.gamma12))?)
            })
            .transpose()
    }

    pub fn cloud(&self) -> Result<CloudGeometry, CliError> {
        let c = self
            .cloud
            .as_ref()
            .ok_or_else(|| CliError::Config("a [cloud] table is required for this command".into()))?;
        let beams = self.beams()?;
        let g = CloudGeometry {
            n_atoms: c.n_atoms,
            rms_width: c.rms_width_um * 1e-6,
            k_wprime: beams.k_wprime(),
        };
        g.validate(beams.wavelength)?;
        Ok(g)
    }

    /// Sweep scenario: sequence storage time and step, 50 decay times of
    /// trace, optional detector.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let atom = self.atom()?;
        let seq = self.sequence(&atom)?;
        let s = Scenario {
            atom,
            beams: self.beams()?,
            t_store: seq.t_store,
            dt: seq.dt,
            decay_windows: 50.0,
            norm: self.normalization()?,
            detector: self.detector(&atom)?,
        };
        s.validate()?;
        Ok(s)
    }
}
