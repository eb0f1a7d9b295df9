//! WKB tunnelling through a one-dimensional barrier:
//! `T = exp(-2/hbar * integral sqrt(2 m (U - E)) ds)` between the classical
//! turning points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Result, TrapError};
use crate::grid::PotentialGrid;
use crate::quadrature::integrate;

/// Rates below this many escapes per second are reported as zero.
pub const RATE_REPORTING_FLOOR: f64 = 1e-3;

const ACTION_REL_TOL: f64 = 1e-9;

/// Potential along an escape path together with the energy of the particle.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierScan {
    /// One-dimensional, coordinate is arc length in m, values in J.
    pub path: PotentialGrid,
    pub energy: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tunnelling {
    pub probability: f64,
    /// Barrier integral of sqrt(2 m (U - E)), J s.
    pub action: f64,
    /// Arc-length turning points, m.
    pub turning_points: Option<(f64, f64)>,
    /// The energy clears the barrier; the probability is 1 by convention.
    pub no_barrier: bool,
}

impl Tunnelling {
    fn free() -> Self {
        Tunnelling { probability: 1.0, action: 0.0, turning_points: None, no_barrier: true }
    }
}

/// Linear interpolation of a uniformly sampled 1D grid.
fn interpolate(grid: &PotentialGrid, s: f64) -> f64 {
    let axis = &grid.axes[0];
    let t = ((s - axis.start) / axis.step).clamp(0.0, (axis.count - 1) as f64);
    let i = (t.floor() as usize).min(axis.count.saturating_sub(2));
    let f = t - i as f64;
    if axis.count == 1 {
        return grid.values[0];
    }
    grid.values[i] * (1.0 - f) + grid.values[i + 1] * f
}

/// Tunnelling probability for a sampled barrier (linearly interpolated).
pub fn tunnelling_probability(scan: &BarrierScan) -> Result<Tunnelling> {
    let grid = &scan.path;
    if grid.dims() != 1 {
        return Err(TrapError::invalid("barrier scan must be one-dimensional"));
    }
    if grid.values.iter().any(|v| !v.is_finite()) {
        return Err(TrapError::invalid("barrier scan contains non-finite samples"));
    }
    let axis = &grid.axes[0];
    let domain = (axis.start, axis.coordinate(axis.count - 1));
    let samples = grid.values.len();
    tunnelling_probability_fn(|s| interpolate(grid, s), domain, scan.energy, scan.mass, samples.max(2) * 4)
}

/// Tunnelling probability for a barrier given as a function of arc length.
/// `resolution` sets the sampling used to bracket the turning points.
pub fn tunnelling_probability_fn<F: Fn(f64) -> f64>(
    potential: F,
    domain: (f64, f64),
    energy: f64,
    mass: f64,
    resolution: usize,
) -> Result<Tunnelling> {
    let (a, b) = domain;
    if !(b > a) || resolution < 2 || !(mass > 0.0) {
        return Err(TrapError::invalid("barrier domain, resolution and mass must be positive"));
    }
    let excess = |s: f64| potential(s) - energy;
    let step = (b - a) / (resolution - 1) as f64;
    let at = |i: usize| if i + 1 == resolution { b } else { a + i as f64 * step };

    // first entry into the classically forbidden region, then the first exit
    let mut left = None;
    let mut right = None;
    let mut prev = excess(a);
    if prev > 0.0 {
        left = Some(a);
    }
    for i in 1..resolution {
        let cur = excess(at(i));
        if left.is_none() && prev <= 0.0 && cur > 0.0 {
            left = Some(bisect_crossing(&excess, at(i - 1), at(i)));
        } else if left.is_some() && prev > 0.0 && cur <= 0.0 {
            right = Some(bisect_crossing(&excess, at(i - 1), at(i)));
            break;
        }
        prev = cur;
    }
    let Some(left) = left else {
        return Ok(Tunnelling::free());
    };
    let right = right.ok_or_else(|| TrapError::invalid("barrier does not close before the end of the path"))?;

    let kernel = |s: f64| (2.0 * mass * excess(s).max(0.0)).sqrt();
    let mid = 0.5 * (left + right);
    // s = left + t^2 and s = right - t^2 remove the square-root endpoints
    let left_half = integrate(|t| 2.0 * t * kernel(left + t * t), 0.0, (mid - left).sqrt(), 0.0, ACTION_REL_TOL);
    let right_half = integrate(|t| 2.0 * t * kernel(right - t * t), 0.0, (right - mid).sqrt(), 0.0, ACTION_REL_TOL);
    let action = left_half.value + right_half.value;
    Ok(Tunnelling {
        probability: (-2.0 * action / HBAR).exp(),
        action,
        turning_points: Some((left, right)),
        no_barrier: false,
    })
}

fn bisect_crossing<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) and f(hi) have opposite signs
    let rising = f(hi) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Escape rate, 1/s: attempt frequency omega / 2 pi times the probability.
pub fn tunnelling_rate(probability: f64, omega: f64) -> f64 {
    omega / (2.0 * PI) * probability
}

/// Rate as printed in tables.
pub fn reported_rate(rate: f64) -> f64 {
    if rate < RATE_REPORTING_FLOOR {
        0.0
    } else {
        rate
    }
}
