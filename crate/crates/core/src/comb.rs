// SPDX-License-Identifier: Apache-2.0

//! Phase-noise algebra for frequency-comb beatnote local oscillators.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::psd::PiecewisePsd;

/// A comb whose `n`-th repetition-rate harmonic, shifted by an AOM, drives
/// the qubit: `ω_q = n ω_rep + ω_AOM`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombSpec {
    /// ω_rep, rad/s
    pub rep_rate: f64,
    /// phase-noise PSD of the fundamental harmonic
    pub rep_phase: PiecewisePsd,
    /// qubit harmonic n
    pub harmonic: u32,
    /// ω_AOM, rad/s
    pub aom: f64,
}

impl CombSpec {
    pub fn new(rep_rate: f64, rep_phase: PiecewisePsd, harmonic: u32, aom: f64) -> Result<Self> {
        if harmonic < 1 {
            return Err(Error::domain("qubit harmonic must be ≥ 1"));
        }
        if !(rep_rate > 0.0 && rep_rate.is_finite() && aom.is_finite()) {
            return Err(Error::domain("repetition rate must be positive and finite"));
        }
        Ok(Self {
            rep_rate,
            rep_phase,
            harmonic,
            aom,
        })
    }

    pub fn qubit_frequency(&self) -> f64 {
        self.harmonic as f64 * self.rep_rate + self.aom
    }
}

/// Phase noise of the `m`-th harmonic: `m² S^(1)`.
pub fn harmonic_phase_psd(comb: &CombSpec, m: u32) -> Result<PiecewisePsd> {
    scale_harmonic(&comb.rep_phase, m)
}

/// `m² S` for any phase PSD.
pub fn scale_harmonic(psd: &PiecewisePsd, m: u32) -> Result<PiecewisePsd> {
    if m < 1 {
        return Err(Error::domain("harmonic index must be ≥ 1"));
    }
    let m = m as f64;
    psd.scaled(m * m)
}

/// Qubit-frequency phase noise when harmonic `m_lock` is locked to an AOM
/// reference: `(n/m)² S_AOM` inside the lock bandwidth, `n² S_rep` outside.
pub fn beatnote_lock_psd(
    comb: &CombSpec,
    m_lock: u32,
    s_aom_phase: &PiecewisePsd,
    servo_bandwidth: f64,
) -> Result<PiecewisePsd> {
    if m_lock < 1 {
        return Err(Error::domain("lock harmonic must be ≥ 1"));
    }
    let ratio = comb.harmonic as f64 / m_lock as f64;
    let below = s_aom_phase.scaled(ratio * ratio)?;
    let above = harmonic_phase_psd(comb, comb.harmonic)?;
    PiecewisePsd::splice(&below, &above, servo_bandwidth)
}

/// Integrated phase variance density of a Lorentzian line of FWHM
/// `fwhm_m` (Hz) observed at harmonic `m`, referred to the fundamental:
/// `S_ν/f² = (Δ/(π m²)) / f²`.
pub fn timing_jitter_integrand(f: f64, fwhm_m: f64, m: u32) -> f64 {
    fwhm_m / (PI * (m as f64).powi(2)) / (f * f)
}

/// RMS timing jitter (s) with the integration ceiling at the Nyquist
/// frequency `ν_rep`.
pub fn linewidth_to_timing_jitter(fwhm_m: f64, m: u32, nu_rep: f64, f_min: f64) -> Result<f64> {
    linewidth_to_timing_jitter_band(fwhm_m, m, nu_rep, f_min, nu_rep)
}

/// `δt = (1/2πν_rep) √(2 (Δ/(π m²)) (1/f_min − 1/f_max))`
pub fn linewidth_to_timing_jitter_band(fwhm_m: f64, m: u32, nu_rep: f64, f_min: f64, f_max: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain("harmonic index must be ≥ 1"));
    }
    if !(f_min > 0.0) {
        return Err(Error::domain(format!("f_min must be positive, got {f_min}")));
    }
    if !(nu_rep > 0.0 && f_max > f_min) {
        return Err(Error::domain("need 0 < f_min < f_max and ν_rep > 0"));
    }
    if !(fwhm_m >= 0.0) {
        return Err(Error::domain("linewidth must be non-negative"));
    }
    let variance = fwhm_m / (PI * (m as f64).powi(2)) * (1.0 / f_min - 1.0 / f_max);
    Ok((2.0 * variance).sqrt() / (2.0 * PI * nu_rep))
}
