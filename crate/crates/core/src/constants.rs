//! Physical constants (CODATA 2018, SI).

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Standard gravity.
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// Joules to microkelvin.
#[inline]
pub fn joule_to_microkelvin(energy: f64) -> f64 {
    energy / BOLTZMANN * 1e6
}

#[inline]
pub fn microkelvin_to_joule(temperature: f64) -> f64 {
    temperature * 1e-6 * BOLTZMANN
}
