//! Photon scattering at the trap minimum and the resulting coherence time.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::potential::TrapModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// Scattering rates, 1/s.
    pub blue_rate: f64,
    pub red_rate: f64,
    /// 1 / (sum of rates), s. `None` when nothing scatters.
    pub coherence_time: Option<f64>,
}

pub fn coherence_time_from_rates(blue_rate: f64, red_rate: f64) -> Option<f64> {
    let total = blue_rate + red_rate;
    (total > 0.0).then(|| 1.0 / total)
}

/// Scattering of both colours for an atom sitting at `position` (x, y, z).
pub fn scattering_at(model: &TrapModel, position: [f64; 3]) -> Result<CoherenceReport> {
    let species = &model.config.species;
    let beta_blue = species.scattering_coefficient(model.config.blue.wavelength())?;
    let beta_red = species.scattering_coefficient(model.config.red.wavelength())?;
    let (i_blue, i_red) = model.intensities_at(position[0], position[1], position[2]);
    let blue_rate = beta_blue * i_blue;
    let red_rate = beta_red * i_red;
    Ok(CoherenceReport { blue_rate, red_rate, coherence_time: coherence_time_from_rates(blue_rate, red_rate) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherence_time_is_inverse_total_rate() {
        assert_eq!(coherence_time_from_rates(1.0, 3.0), Some(0.25));
        assert_eq!(coherence_time_from_rates(0.0, 0.0), None);
    }
}
