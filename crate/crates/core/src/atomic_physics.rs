//! Atomic line data and the multi-line dipole and scattering coefficients.
//!
//! The light shift of the ground state is `U = alpha(lambda) * I` with
//!
//! ```text
//! alpha = sum_i 3 pi c^2 Gamma_i b_i / (2 omega_i^3) * [1/(omega - omega_i) - 1/(omega + omega_i)]
//! ```
//!
//! and the photon scattering rate is `Gamma_sc = beta(lambda) * I` with the
//! rotating-wave form
//!
//! ```text
//! beta = sum_i 3 pi c^2 Gamma_i^2 b_i / (2 hbar omega_i^3) * 1/(omega - omega_i)^2
//! ```
//!
//! `b_i` is the fraction of the ground-state oscillator strength carried by
//! line `i` within its fine-structure family (2/3 and 1/3 for a P3/2, P1/2
//! doublet).

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS_UNIT, HBAR, SPEED_OF_LIGHT};
use crate::error::{Result, TrapError};

const RB87_JSON: &str = include_str!("../data/rb87.json");

/// Lines closer than this to the probe wavelength are treated as resonant.
pub const DEFAULT_GUARD_BAND: f64 = 0.01e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicLine {
    pub label: String,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Partial decay rate of the upper state to the ground state, rad/s.
    pub natural_linewidth: f64,
    pub branching_weight: f64,
}

impl AtomicLine {
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.wavelength
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    pub lines: Vec<AtomicLine>,
    /// Surface van der Waals coefficient, J m^3.
    pub c3: f64,
    /// Reduced transition wavelength of the Casimir-Polder crossover, m.
    pub lambda_eff: f64,
    pub guard_band: f64,
}

/// On-disk species record. Units are in the field names.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpeciesFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
    pub lines: Vec<LineRecord>,
    pub c3_J_m3: f64,
    pub lambda_eff_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard_band_nm: Option<f64>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LineRecord {
    #[serde(default)]
    pub label: String,
    pub wavelength_nm: f64,
    pub linewidth_2pi_MHz: f64,
    pub weight: f64,
}

impl SpeciesFile {
    pub fn into_species(self) -> Result<AtomSpecies> {
        let mass = match (self.mass_kg, self.mass_amu) {
            (Some(kg), _) => kg,
            (None, Some(amu)) => amu * ATOMIC_MASS_UNIT,
            (None, None) => return Err(TrapError::config_field("species.mass_kg", "missing mass")),
        };
        let species = AtomSpecies {
            name: self.name,
            mass,
            lines: self
                .lines
                .into_iter()
                .map(|l| AtomicLine {
                    label: l.label,
                    wavelength: l.wavelength_nm * 1e-9,
                    natural_linewidth: 2.0 * PI * l.linewidth_2pi_MHz * 1e6,
                    branching_weight: l.weight,
                })
                .collect(),
            c3: self.c3_J_m3,
            lambda_eff: self.lambda_eff_nm * 1e-9,
            guard_band: self.guard_band_nm.map_or(DEFAULT_GUARD_BAND, |g| g * 1e-9),
        };
        species.validate()?;
        Ok(species)
    }
}

impl AtomSpecies {
    /// Rb-87 with the five strongest ground-state lines, shipped with the crate.
    pub fn rubidium87() -> Self {
        Self::from_json_str(RB87_JSON).expect("bundled Rb-87 data is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpeciesFile = serde_json::from_str(text).map_err(|e| TrapError::Config {
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
            field: None,
        })?;
        file.into_species()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |f: &str, m: &str| Err(TrapError::config_field(format!("species.{f}"), m));
        if !(self.mass > 0.0) {
            return bad("mass_kg", "mass must be positive");
        }
        if !(self.c3 > 0.0) {
            return bad("c3_J_m3", "C3 must be positive");
        }
        if !(self.lambda_eff > 0.0) {
            return bad("lambda_eff_nm", "lambda_eff must be positive");
        }
        if self.lines.len() < 2 {
            return bad("lines", "at least two lines are required");
        }
        for (i, line) in self.lines.iter().enumerate() {
            if !(line.wavelength > 0.0) {
                return bad(&format!("lines[{i}].wavelength_nm"), "must be positive");
            }
            if !(line.natural_linewidth > 0.0) {
                return bad(&format!("lines[{i}].linewidth_2pi_MHz"), "must be positive");
            }
            if !(line.branching_weight > 0.0 && line.branching_weight <= 1.0) {
                return bad(&format!("lines[{i}].weight"), "must lie in (0, 1]");
            }
        }
        Ok(())
    }

    fn check_detuning(&self, wavelength: f64) -> Result<()> {
        if !(wavelength > 0.0) {
            return Err(TrapError::invalid("wavelength must be positive"));
        }
        for line in &self.lines {
            if (wavelength - line.wavelength).abs() < self.guard_band {
                return Err(TrapError::ZeroDetuning {
                    wavelength_nm: wavelength * 1e9,
                    line_nm: line.wavelength * 1e9,
                });
            }
        }
        Ok(())
    }

    /// Light-shift coefficient `alpha` in J m^2 / W; positive for blue detuning.
    pub fn dipole_coefficient(&self, wavelength: f64) -> Result<f64> {
        self.check_detuning(wavelength)?;
        let omega = 2.0 * PI * SPEED_OF_LIGHT / wavelength;
        Ok(self
            .lines
            .iter()
            .map(|line| {
                let wi = line.angular_frequency();
                let strength =
                    3.0 * PI * SPEED_OF_LIGHT.powi(2) * line.natural_linewidth * line.branching_weight
                        / (2.0 * wi.powi(3));
                strength * (1.0 / (omega - wi) - 1.0 / (omega + wi))
            })
            .sum())
    }

    /// Scattering coefficient `beta` in s^-1 per W/m^2.
    pub fn scattering_coefficient(&self, wavelength: f64) -> Result<f64> {
        self.check_detuning(wavelength)?;
        let omega = 2.0 * PI * SPEED_OF_LIGHT / wavelength;
        Ok(self
            .lines
            .iter()
            .map(|line| {
                let wi = line.angular_frequency();
                let strength = 3.0
                    * PI
                    * SPEED_OF_LIGHT.powi(2)
                    * line.natural_linewidth.powi(2)
                    * line.branching_weight
                    / (2.0 * HBAR * wi.powi(3));
                strength / (omega - wi).powi(2)
            })
            .sum())
    }
}
