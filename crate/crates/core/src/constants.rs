//! Physical constants (CODATA 2018 exact SI values where defined) and unit factors.

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// One torr in pascal (1 atm / 760).
pub const TORR: f64 = 101_325.0 / 760.0;
pub const ANGSTROM2_IN_CM2: f64 = 1e-16;
pub const ANGSTROM2_IN_M2: f64 = 1e-20;
pub const NM: f64 = 1e-9;
