// SPDX-License-Identifier: Apache-2.0

//! Noise-budget engine relating laser intensity and frequency noise spectra
//! to single-qubit gate infidelity.
//!
//! All power spectral densities are single-sided and indexed by angular
//! Fourier frequency (rad/s). Frequency-noise PSDs are expressed in
//! (rad/s)²/Hz, so that a white level `h` corresponds to a Lorentzian
//! linewidth of `h / 4π` Hz.
//!
//! Module map:
//! - [`psd`]: piecewise spectral densities, laser noise models, servo loops
//! - [`comb`]: frequency-comb beatnote phase-noise algebra
//! - [`coupling`]: laser noise to Hamiltonian noise-field conversion
//! - [`filter`]: analytic and numerical filter functions, pulse sequences
//! - [`fidelity`]: χ decay constants, separation lines, error floors, sweeps
//! - [`mc`]: Monte Carlo time-domain validation

pub mod comb;
pub mod constants;
pub mod coupling;
pub mod error;
pub mod fidelity;
pub mod filter;
pub mod mc;
pub mod psd;
pub mod quadrature;

pub use error::{Error, Result};
