// SPDX-License-Identifier: Apache-2.0

//! Physical constants (CODATA 2018 exact values where defined).

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = 2.0 * PI;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
pub fn optical_angular_frequency(lambda: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / lambda
}

/// Converts a level in dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
