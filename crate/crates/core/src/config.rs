//! On-disk trap configuration (JSON, SI-suffixed field names) and the
//! bundled presets.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atomic_physics::{AtomSpecies, SpeciesFile};
use crate::error::{Result, TrapError};
use crate::mode_model::{CrossRegion, CrossedModePair, FringeModel, ModeSpec, DEFAULT_REFLECTION_AMPLITUDE};
use crate::parallel::Execution;
use crate::potential::TrapConfig;
use crate::slab_solver::{rib_neff, CoreMaterial, Polarization, SlabGeometry};
use crate::trap_analysis::AnalysisSettings;

pub const PRESET_NAMES: [&str; 4] = ["C1", "C2", "C3", "C4"];

const PRESETS: [(&str, &str); 4] = [
    ("C1", include_str!("../presets/C1.json")),
    ("C2", include_str!("../presets/C2.json")),
    ("C3", include_str!("../presets/C3.json")),
    ("C4", include_str!("../presets/C4.json")),
];

/// Power and intensity given together must agree to this relative tolerance.
const AREA_CONSISTENCY: f64 = 0.01;

fn yes() -> bool {
    true
}
fn plus_one() -> i8 {
    1
}
fn unit_index() -> f64 {
    1.0
}
fn reflection_default() -> f64 {
    DEFAULT_REFLECTION_AMPLITUDE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub geometry: GeometryFile,
    pub blue: ModeFile,
    pub red: ModeFile,
    #[serde(default)]
    pub species: SpeciesSource,
    #[serde(default = "plus_one")]
    pub gravity_sign: i8,
    #[serde(default = "yes")]
    pub diffraction: bool,
    #[serde(default = "reflection_default")]
    pub reflection_amplitude: f64,
    #[serde(default)]
    pub analysis: AnalysisFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub core_thickness_nm: f64,
    pub rib_height_nm: f64,
    pub rib_width_um: f64,
    #[serde(default = "fused_silica")]
    pub core: CoreMaterial,
    #[serde(default = "unit_index")]
    pub cladding_index: f64,
}

fn fused_silica() -> CoreMaterial {
    CoreMaterial::FusedSilica
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeFile {
    pub wavelength_nm: f64,
    pub lateral_width_um: f64,
    /// Solved from the geometry when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_eff_rib: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_eff_cross: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_intensity_W_per_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_mW: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_area_um2: Option<f64>,
    #[serde(default)]
    pub fringe_model: FringeModel,
    #[serde(default)]
    pub relative_detuning_MHz: f64,
}

/// `"rb87"` for the bundled data set or an inline species record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeciesSource {
    Builtin(String),
    Inline(Box<SpeciesFile>),
}

impl Default for SpeciesSource {
    fn default() -> Self {
        SpeciesSource::Builtin("rb87".into())
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_uK: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_x_step_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_range_nm: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_lateral_step_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lateral_half_extent_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position_tolerance_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step_x_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step_lateral_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_x_range_nm: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_x_step_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_extent_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_step_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub execution: Option<Execution>,
}

impl AnalysisFile {
    fn settings(&self) -> AnalysisSettings {
        let d = AnalysisSettings::default();
        let nm = |v: Option<f64>, dflt: f64| v.map_or(dflt, |v| v * 1e-9);
        let range = |v: Option<[f64; 2]>, dflt: (f64, f64)| v.map_or(dflt, |[a, b]| (a * 1e-9, b * 1e-9));
        AnalysisSettings {
            coarse_x_step: nm(self.coarse_x_step_nm, d.coarse_x_step),
            x_range: range(self.x_range_nm, d.x_range),
            coarse_lateral_step: nm(self.coarse_lateral_step_nm, d.coarse_lateral_step),
            lateral_half_extent: self.lateral_half_extent_um.map(|v| v * 1e-6),
            position_tolerance: nm(self.position_tolerance_nm, d.position_tolerance),
            fd_step_x: nm(self.fd_step_x_nm, d.fd_step_x),
            fd_step_lateral: nm(self.fd_step_lateral_nm, d.fd_step_lateral),
            column_x_range: range(self.column_x_range_nm, d.column_x_range),
            column_x_step: nm(self.column_x_step_nm, d.column_x_step),
            path_extent: self.path_extent_um.map_or(d.path_extent, |v| v * 1e-6),
            path_step: nm(self.path_step_nm, d.path_step),
            temperature: self.temperature_uK.map_or(d.temperature, |t| t * 1e-6),
            execution: self.execution.unwrap_or(d.execution),
        }
    }
}

impl ConfigFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            TrapError::Config {
                message: inner.to_string(),
                line: Some(inner.line()),
                column: Some(inner.column()),
                field: (path != ".").then_some(path),
            }
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_json(name)?;
        Self::from_json_str(text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Resolves defaults (effective indices, intensities) into a validated config.
    pub fn build(&self) -> Result<TrapConfig> {
        let g = &self.geometry;
        let geometry = SlabGeometry {
            core_thickness: g.core_thickness_nm * 1e-9,
            rib_height: g.rib_height_nm * 1e-9,
            rib_width: g.rib_width_um * 1e-6,
            core: g.core,
            cladding_index: g.cladding_index,
        };
        let mut region = CrossRegion::new(geometry.rib_width);
        region.diffraction = self.diffraction;
        region.reflection_amplitude = self.reflection_amplitude;
        if !(self.reflection_amplitude >= 0.0 && self.reflection_amplitude < 1.0) {
            return Err(TrapError::config_field("reflection_amplitude", "must lie in [0, 1)"));
        }
        let species = match &self.species {
            SpeciesSource::Builtin(name) if name.eq_ignore_ascii_case("rb87") => AtomSpecies::rubidium87(),
            SpeciesSource::Builtin(other) => {
                return Err(TrapError::config_field("species", format!("unknown species `{other}`")))
            }
            SpeciesSource::Inline(file) => file.as_ref().clone().into_species()?,
        };
        let pair = |m: &ModeFile, field: &str| -> Result<CrossedModePair> {
            let mode = m.mode_spec(&geometry, field)?;
            let mut pair = CrossedModePair::symmetric(mode, region);
            pair.relative_detuning = m.relative_detuning_MHz * 1e6;
            Ok(pair)
        };
        let config = TrapConfig {
            name: self.name.clone(),
            blue: pair(&self.blue, "blue")?,
            red: pair(&self.red, "red")?,
            geometry,
            species,
            gravity_sign: self.gravity_sign,
            analysis: self.analysis.settings(),
            hash: self.hash(),
        };
        config.validate()?;
        Ok(config)
    }
}

impl ModeFile {
    fn mode_spec(&self, geometry: &SlabGeometry, field: &str) -> Result<ModeSpec> {
        let wavelength = self.wavelength_nm * 1e-9;
        let bad = |f: &str, msg: &str| TrapError::config_field(format!("{field}.{f}"), msg);
        if !(wavelength > 0.0) {
            return Err(bad("wavelength_nm", "must be positive"));
        }
        let solved = match (self.n_eff_rib, self.n_eff_cross) {
            (Some(_), Some(_)) => None,
            _ => Some(rib_neff(geometry, wavelength, Polarization::TE)?.0),
        };
        let n_eff_cross = self.n_eff_cross.or(solved).expect("solved when absent");
        let n_eff_rib = self.n_eff_rib.or(solved).expect("solved when absent");

        let power = self.power_mW.map(|p| p * 1e-3);
        let area = self.effective_area_um2.map(|a| a * 1e-12);
        let (peak, area) = match (self.peak_intensity_W_per_m2, power, area) {
            (Some(i), Some(p), Some(a)) => {
                if (p - i * a).abs() > AREA_CONSISTENCY * p.abs().max(i * a) {
                    return Err(bad("power_mW", "inconsistent with peak intensity times effective area"));
                }
                (i, Some(a))
            }
            (Some(i), Some(p), None) => (i, (i > 0.0).then(|| p / i)),
            (Some(i), None, a) => (i, a),
            (None, Some(p), Some(a)) => (p / a, Some(a)),
            _ => {
                return Err(bad(
                    "peak_intensity_W_per_m2",
                    "give the peak intensity or both power_mW and effective_area_um2",
                ))
            }
        };
        let mode = ModeSpec {
            wavelength,
            lateral_width: self.lateral_width_um * 1e-6,
            n_eff_rib,
            n_eff_cross,
            peak_intensity: peak,
            effective_area: area,
            fringe_model: self.fringe_model,
        };
        mode.validate(field)?;
        Ok(mode)
    }
}

pub fn preset_json(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, text)| *text)
        .ok_or_else(|| TrapError::config_field("preset", format!("unknown preset `{name}` (known: C1, C2, C3, C4)")))
}

pub fn load_preset(name: &str) -> Result<TrapConfig> {
    ConfigFile::preset(name)?.build()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<TrapConfig> {
    ConfigFile::from_file(path)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_build() {
        for name in PRESET_NAMES {
            let cfg = load_preset(name).unwrap();
            assert_eq!(cfg.name, name);
            assert_eq!(cfg.hash.len(), 16);
        }
    }

    #[test]
    fn power_and_area_derive_intensity() {
        let mut file = ConfigFile::preset("C1").unwrap();
        file.blue.peak_intensity_W_per_m2 = None;
        file.blue.power_mW = Some(25.7);
        file.blue.effective_area_um2 = Some(25.7e-3 / 1.65e10 * 1e12);
        let cfg = file.build().unwrap();
        assert!((cfg.blue.mode_i.peak_intensity / 1.65e10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_power_is_rejected_with_field() {
        let mut file = ConfigFile::preset("C1").unwrap();
        file.blue.effective_area_um2 = Some(3.0);
        match file.build().unwrap_err() {
            TrapError::Config { field, .. } => assert_eq!(field.as_deref(), Some("blue.power_mW")),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_field_reports_path_and_line() {
        let text = "{\n  \"name\": \"x\",\n  \"geometry\": {\"core_thickness_nm\": 300, \"rib_height_nm\": 15, \"rib_width_um\": 2, \"colour\": 1}\n}";
        match ConfigFile::from_json_str(text).unwrap_err() {
            TrapError::Config { line, field, message, .. } => {
                assert_eq!(line, Some(3));
                assert!(field.unwrap().starts_with("geometry"));
                assert!(message.contains("colour"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ConfigFile::preset("C1").unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.red.lateral_width_um += 1e-6;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn solved_indices_fill_missing_values() {
        let cfg = load_preset("C4").unwrap();
        let red = &cfg.red.mode_i;
        assert_eq!(red.n_eff_rib, red.n_eff_cross);
        assert!(red.n_eff_cross > 1.2 && red.n_eff_cross < 1.3);
    }
}
