//! Analytic surface-intensity model of two crossed guided modes.
//!
//! Each waveguide carries a mode with a Gaussian lateral profile of 1/e^2
//! radius `w_m`. Inside the square cross region the mode is unguided
//! laterally and spreads like a Gaussian beam with its waist at the entry
//! edge; downstream of the cross the guided width is restored. Optional
//! factors add the inter-mode interference fringes along the transverse
//! diagonal and the weak reflection fringes on the incident side.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrapError};

/// Relative frequency shift above which moving fringes are averaged out.
pub const SMEARING_DETUNING_HZ: f64 = 100e6;
/// Relative fringe amplitude reached at the corners of the cross region.
pub const INTERFERENCE_EDGE_AMPLITUDE: f64 = 0.15;
pub const DEFAULT_REFLECTION_AMPLITUDE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FringeModel {
    #[default]
    None,
    Static,
    Smeared,
}

impl std::str::FromStr for FringeModel {
    type Err = TrapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FringeModel::None),
            "static" => Ok(FringeModel::Static),
            "smeared" => Ok(FringeModel::Smeared),
            other => Err(TrapError::invalid(format!("unknown fringe model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// 1/e^2 intensity radius of the guided mode, m.
    pub lateral_width: f64,
    /// Effective index inside the guiding rib (sets the reflection fringe period).
    pub n_eff_rib: f64,
    /// Effective index in the cross region (decay length, Rayleigh length, fringes).
    pub n_eff_cross: f64,
    /// Peak surface intensity of this mode alone, W/m^2.
    pub peak_intensity: f64,
    /// m^2; `power = peak_intensity * effective_area`.
    pub effective_area: Option<f64>,
    pub fringe_model: FringeModel,
}

impl ModeSpec {
    pub fn power(&self) -> Option<f64> {
        self.effective_area.map(|a| a * self.peak_intensity)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        let bad = |f: &str, m: &str| Err(TrapError::config_field(format!("{field}.{f}"), m));
        if !(self.wavelength > 0.0) {
            return bad("wavelength_nm", "must be positive");
        }
        if !(self.lateral_width > 0.0) {
            return bad("lateral_width_um", "must be positive");
        }
        if !(self.n_eff_cross > 1.0) {
            return bad("n_eff_cross", "must exceed 1 for an evanescent wave");
        }
        if !(self.n_eff_rib > 1.0) {
            return bad("n_eff_rib", "must exceed 1");
        }
        if !(self.peak_intensity >= 0.0) || !self.peak_intensity.is_finite() {
            return bad("peak_intensity_W_per_m2", "must be finite and non-negative");
        }
        if let Some(area) = self.effective_area {
            if !(area > 0.0) {
                return bad("effective_area_um2", "must be positive");
            }
        }
        Ok(())
    }

    /// Intensity integrated across the lateral Gaussian, W/m.
    pub fn lateral_line_density(&self) -> f64 {
        self.peak_intensity * self.lateral_width * (PI / 2.0).sqrt()
    }
}

/// Distance over which the mode spreads once lateral guiding is lost.
pub fn rayleigh_length(mode: &ModeSpec) -> f64 {
    PI * mode.lateral_width.powi(2) * mode.n_eff_cross / mode.wavelength
}

/// 1/e depth of the evanescent field amplitude; intensity falls as exp(-2x/d).
pub fn decay_length(mode: &ModeSpec) -> Result<f64> {
    decay_length_for(mode.wavelength, mode.n_eff_cross)
}

pub fn decay_length_for(wavelength: f64, n_eff: f64) -> Result<f64> {
    if !(n_eff > 1.0) {
        return Err(TrapError::NoEvanescentWave { n_eff });
    }
    Ok(wavelength / (2.0 * PI * (n_eff * n_eff - 1.0).sqrt()))
}

/// Fringe period of two crossed modes along the transverse diagonal.
pub fn interference_period(wavelength: f64, n_eff: f64) -> f64 {
    wavelength / (SQRT_2 * n_eff)
}

/// Period of the standing wave formed by the incident and reflected mode.
pub fn reflection_period(wavelength: f64, n_eff: f64) -> f64 {
    wavelength / (2.0 * n_eff)
}

/// `1 + amplitude cos(2 pi s / period)`; `s` is measured along the incident
/// waveguide from the entry edge of the cross region.
pub fn reflection_fringe_factor(mode: &ModeSpec, s: f64, amplitude: f64) -> f64 {
    if amplitude == 0.0 {
        return 1.0;
    }
    let period = reflection_period(mode.wavelength, mode.n_eff_rib);
    1.0 + amplitude * (2.0 * PI * s / period).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRegion {
    /// Side of the square cross region (the rib width), m.
    pub rib_width: f64,
    /// Gaussian-beam spreading through the cross region.
    pub diffraction: bool,
    pub reflection_amplitude: f64,
}

impl CrossRegion {
    pub fn new(rib_width: f64) -> Self {
        CrossRegion {
            rib_width,
            diffraction: true,
            reflection_amplitude: DEFAULT_REFLECTION_AMPLITUDE,
        }
    }

    fn half(&self) -> f64 {
        0.5 * self.rib_width
    }

    pub fn contains(&self, y: f64, z: f64) -> bool {
        y.abs() <= self.half() && z.abs() <= self.half()
    }
}

/// One colour: waveguide I runs along y, waveguide II along z.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedModePair {
    pub mode_i: ModeSpec,
    pub mode_ii: ModeSpec,
    /// Frequency offset between the two modes, Hz.
    pub relative_detuning: f64,
    pub region: CrossRegion,
}

impl CrossedModePair {
    pub fn symmetric(mode: ModeSpec, region: CrossRegion) -> Self {
        CrossedModePair {
            mode_i: mode.clone(),
            mode_ii: mode,
            relative_detuning: 0.0,
            region,
        }
    }

    pub fn wavelength(&self) -> f64 {
        self.mode_i.wavelength
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        self.mode_i.validate(field)?;
        self.mode_ii.validate(field)?;
        if self.mode_i.wavelength != self.mode_ii.wavelength {
            return Err(TrapError::config_field(field, "both modes of a pair must share a wavelength"));
        }
        if !(self.relative_detuning >= 0.0) {
            return Err(TrapError::config_field(
                format!("{field}.relative_detuning_MHz"),
                "must be non-negative",
            ));
        }
        if !(self.region.rib_width > 0.0) {
            return Err(TrapError::config_field("geometry.rib_width_um", "must be positive"));
        }
        Ok(())
    }

    /// Fringe model after the smearing rule: static fringes between modes
    /// detuned by at least 100 MHz move too fast for the atoms to follow.
    pub fn effective_fringe_model(&self) -> FringeModel {
        match self.mode_i.fringe_model {
            FringeModel::Static if self.relative_detuning >= SMEARING_DETUNING_HZ => {
                FringeModel::Smeared
            }
            m => m,
        }
    }

    /// Multiplier on the summed intensity at transverse-diagonal coordinate `t`.
    pub fn interference_fringe_factor(&self, t: f64) -> Result<f64> {
        match self.effective_fringe_model() {
            FringeModel::None => Err(TrapError::FringeModelDisabled),
            FringeModel::Smeared => Ok(1.0),
            FringeModel::Static => Ok(self.static_fringe(t)),
        }
    }

    fn static_fringe(&self, t: f64) -> f64 {
        let edge = self.region.rib_width * SQRT_2 / 2.0;
        if t.abs() > edge {
            return 1.0;
        }
        let amplitude = INTERFERENCE_EDGE_AMPLITUDE * t.abs() / edge;
        let period = interference_period(self.wavelength(), self.mode_i.n_eff_cross);
        1.0 + amplitude * (2.0 * PI * t / period).cos()
    }

    /// Surface intensity (x = 0) at lateral position (y, z), W/m^2.
    pub fn surface_intensity(&self, y: f64, z: f64) -> f64 {
        let fringes = self.effective_fringe_model();
        let a = self.single_mode(&self.mode_i, y, z, fringes);
        let b = self.single_mode(&self.mode_ii, z, y, fringes);
        let mut total = a + b;
        if fringes == FringeModel::Static && self.region.contains(y, z) {
            total *= self.static_fringe((y - z) / SQRT_2);
        }
        total
    }

    /// Contribution of one waveguide; `along` is the propagation coordinate,
    /// `across` the lateral one.
    fn single_mode(&self, mode: &ModeSpec, along: f64, across: f64, fringes: FringeModel) -> f64 {
        if mode.peak_intensity == 0.0 {
            return 0.0;
        }
        let half = self.region.half();
        let w0 = mode.lateral_width;
        let w = if self.region.diffraction && along.abs() <= half {
            let from_entry = along + half;
            w0 * (1.0 + (from_entry / rayleigh_length(mode)).powi(2)).sqrt()
        } else {
            w0
        };
        let mut value = mode.peak_intensity * (-2.0 * across * across / (w * w)).exp() * (w0 / w);
        if fringes != FringeModel::None && along < -half {
            value *= reflection_fringe_factor(mode, along + half, self.region.reflection_amplitude);
        }
        value
    }
}
