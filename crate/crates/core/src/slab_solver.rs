//! Fused-silica dispersion and guided-mode effective indices of a symmetric
//! (vacuum-clad) slab, with the effective-index treatment of a shallow rib.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrapError};

const SELLMEIER_MIN: f64 = 0.2e-6;
const SELLMEIER_MAX: f64 = 2.0e-6;
const RESIDUAL_TOL: f64 = 1e-12;

/// Refractive index of fused silica (Malitson Sellmeier fit).
pub fn silica_index(wavelength: f64) -> Result<f64> {
    if !(wavelength > SELLMEIER_MIN && wavelength < SELLMEIER_MAX) {
        return Err(TrapError::OutOfRange {
            wavelength_nm: wavelength * 1e9,
            min_nm: SELLMEIER_MIN * 1e9,
            max_nm: SELLMEIER_MAX * 1e9,
        });
    }
    const TERMS: [(f64, f64); 3] = [
        (0.696_166_3, 0.068_404_3),
        (0.407_942_6, 0.116_241_4),
        (0.897_479_4, 9.896_161),
    ];
    let l2 = (wavelength * 1e6).powi(2);
    let n2 = 1.0 + TERMS.iter().map(|(b, c)| b * l2 / (l2 - c * c)).sum::<f64>();
    Ok(n2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    #[default]
    TE,
    TM,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreMaterial {
    FusedSilica,
    Fixed(f64),
}

impl CoreMaterial {
    pub fn index(&self, wavelength: f64) -> Result<f64> {
        match *self {
            CoreMaterial::FusedSilica => silica_index(wavelength),
            CoreMaterial::Fixed(n) => Ok(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabGeometry {
    /// Membrane thickness h, m.
    pub core_thickness: f64,
    /// Rib height on top of the membrane, m.
    pub rib_height: f64,
    /// Rib width, m. Also the side of the square cross region.
    pub rib_width: f64,
    pub core: CoreMaterial,
    pub cladding_index: f64,
}

impl SlabGeometry {
    pub fn suspended_silica(core_thickness: f64, rib_height: f64, rib_width: f64) -> Self {
        SlabGeometry {
            core_thickness,
            rib_height,
            rib_width,
            core: CoreMaterial::FusedSilica,
            cladding_index: 1.0,
        }
    }

    pub fn validate(&self, wavelength: f64) -> Result<()> {
        if !(self.core_thickness > 0.0) {
            return Err(TrapError::config_field("geometry.core_thickness_nm", "must be positive"));
        }
        if !(self.rib_height >= 0.0) {
            return Err(TrapError::config_field("geometry.rib_height_nm", "must be non-negative"));
        }
        if !(self.rib_width > 0.0) {
            return Err(TrapError::config_field("geometry.rib_width_um", "must be positive"));
        }
        let n_core = self.core.index(wavelength)?;
        if !(self.cladding_index >= 1.0 && n_core > self.cladding_index) {
            return Err(TrapError::config_field(
                "geometry.core_index",
                "need core index > cladding index >= 1",
            ));
        }
        Ok(())
    }
}

/// Half the normalized frequency, `V/2 = (k0 h / 2) sqrt(n1^2 - n0^2)`.
pub fn half_v(thickness: f64, n_core: f64, n_clad: f64, wavelength: f64) -> f64 {
    PI / wavelength * thickness * (n_core * n_core - n_clad * n_clad).sqrt()
}

/// Residual of the symmetric-slab eigenvalue equation in the transverse
/// variable `u = kappa h / 2`, with `w = sqrt(R^2 - u^2)`.
///
/// Even orders: `u tan u - r w`; odd orders: `-u cot u - r w`; `r = 1` for TE
/// and `(n1/n0)^2` for TM.
pub fn dispersion_residual(u: f64, radius: f64, order: usize, ratio: f64) -> f64 {
    let w = (radius * radius - u * u).max(0.0).sqrt();
    if order.is_multiple_of(2) {
        u * u.tan() - ratio * w
    } else {
        -u / u.tan() - ratio * w
    }
}

/// Effective index of the `order`-th guided mode of a symmetric slab.
pub fn slab_neff_raw(
    thickness: f64,
    n_core: f64,
    n_clad: f64,
    wavelength: f64,
    polarization: Polarization,
    order: usize,
) -> Result<f64> {
    let radius = half_v(thickness, n_core, n_clad, wavelength);
    let lo_bound = order as f64 * FRAC_PI_2;
    if radius <= lo_bound {
        return Err(TrapError::ModeCutoff { order, half_v: radius });
    }
    let ratio = match polarization {
        Polarization::TE => 1.0,
        Polarization::TM => (n_core / n_clad).powi(2),
    };
    let f = |u: f64| dispersion_residual(u, radius, order, ratio);

    // f < 0 at the lower end and > 0 at (or just below) the upper one.
    let mut lo = lo_bound;
    let mut hi = ((order + 1) as f64 * FRAC_PI_2).min(radius);
    if hi >= (order + 1) as f64 * FRAC_PI_2 {
        hi *= 1.0 - f64::EPSILON;
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..400 {
        u = 0.5 * (lo + hi);
        let value = f(u);
        if value.abs() < RESIDUAL_TOL || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if value < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
    }
    let k0 = 2.0 * PI / wavelength;
    let kappa = 2.0 * u / thickness;
    Ok((n_core * n_core - (kappa / k0).powi(2)).sqrt())
}

/// Effective index of the membrane slab (thickness h) at `wavelength`.
pub fn slab_neff(
    geometry: &SlabGeometry,
    wavelength: f64,
    polarization: Polarization,
    order: usize,
) -> Result<f64> {
    geometry.validate(wavelength)?;
    let n_core = geometry.core.index(wavelength)?;
    slab_neff_raw(
        geometry.core_thickness,
        n_core,
        geometry.cladding_index,
        wavelength,
        polarization,
        order,
    )
}

/// Fundamental-mode effective indices under the rib (thickness h + h_rib)
/// and beside it (thickness h).
pub fn rib_neff(
    geometry: &SlabGeometry,
    wavelength: f64,
    polarization: Polarization,
) -> Result<(f64, f64)> {
    geometry.validate(wavelength)?;
    let n_core = geometry.core.index(wavelength)?;
    let n_clad = geometry.cladding_index;
    let slab = slab_neff_raw(geometry.core_thickness, n_core, n_clad, wavelength, polarization, 0)?;
    if geometry.rib_height == 0.0 {
        return Ok((slab, slab));
    }
    let rib = slab_neff_raw(
        geometry.core_thickness + geometry.rib_height,
        n_core,
        n_clad,
        wavelength,
        polarization,
        0,
    )?;
    Ok((rib, slab))
}
