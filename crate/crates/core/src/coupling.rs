// SPDX-License-Identifier: Apache-2.0

//! Mapping laser noise onto the qubit's dephasing (`S_z`) and amplitude
//! (`S_θ`) noise fields.
//!
//! Error Hamiltonian: `β_z σ_z + β_θ n·σ` with `β_z = δΔ/2` and
//! `β_θ = δΩ/2`, hence `S_z = S_Δ/4` and `S_θ = S_Ω/4`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psd::PiecewisePsd;

/// Main-text cw Stark coefficient.
pub const MU_CW_DEFAULT: f64 = 1e-3;
/// Alternative cw Stark coefficient.
pub const MU_CW_ALT: f64 = 1e-4;
/// Frequency-comb Stark coefficient, 1/Hz.
pub const MU_FC_DEFAULT: f64 = 1e-9;

/// Whether Rabi flopping is driven by a single field or a Raman pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    OnePhoton,
    TwoPhoton,
}

impl TransitionKind {
    /// κ in `S_θ = κ Ω² S_RIN`.
    pub fn kappa(self) -> f64 {
        match self {
            TransitionKind::OnePhoton => 0.25 * 0.25,
            TransitionKind::TwoPhoton => 0.25,
        }
    }

    /// κ as it enters the intensity-noise bound `h_a′ < … /(κΩ²)`.
    pub fn rin_kappa(self) -> f64 {
        match self {
            TransitionKind::OnePhoton => 0.25,
            TransitionKind::TwoPhoton => 1.0,
        }
    }
}

/// Which light source produces the AC Stark shift on a Raman transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarkSource {
    ContinuousWave,
    FrequencyComb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitSpec {
    /// Optical qubit driven on resonance.
    Optical {
        /// excited-state lifetime τ_e, s
        lifetime: f64,
        /// transition wavelength λ_O, m
        wavelength: f64,
    },
    /// Hyperfine qubit driven by a Raman pair detuned from the P manifold.
    Hyperfine {
        /// intermediate-state linewidth Γ, rad/s
        linewidth: f64,
        /// fine-structure splitting ω_F, rad/s
        fine_structure: f64,
        /// Raman detuning Δ from the upper fine-structure level, rad/s
        detuning: f64,
        /// wavelength of the upper fine-structure transition, m
        wavelength: f64,
        /// dimensionless cw Stark coefficient
        mu_cw: f64,
        /// comb Stark coefficient, 1/Hz
        mu_fc: f64,
    },
}

impl QubitSpec {
    /// ⁴⁰Ca⁺ S₁/₂–D₅/₂ (729 nm, τ = 1.17 s).
    pub fn optical_ca40() -> Self {
        QubitSpec::Optical {
            lifetime: 1.17,
            wavelength: 729e-9,
        }
    }

    /// ⁴³Ca⁺ hyperfine qubit, Raman beams at the optimal detuning from P₃/₂.
    pub fn hyperfine_ca43() -> Self {
        let fine_structure = 2.0 * PI * 6.68e12;
        QubitSpec::Hyperfine {
            linewidth: 2.0 * PI * 21.6e6,
            fine_structure,
            detuning: optimal_detuning(fine_structure),
            wavelength: 393e-9,
            mu_cw: MU_CW_DEFAULT,
            mu_fc: MU_FC_DEFAULT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            QubitSpec::Optical { lifetime, wavelength } => {
                if !(lifetime > 0.0 && wavelength > 0.0) {
                    return Err(Error::domain("optical qubit needs τ_e > 0 and λ > 0"));
                }
            }
            QubitSpec::Hyperfine {
                linewidth,
                fine_structure,
                detuning,
                wavelength,
                mu_cw,
                mu_fc,
            } => {
                if !(linewidth > 0.0 && fine_structure > 0.0 && wavelength > 0.0) {
                    return Err(Error::domain("hyperfine qubit needs Γ, ω_F, λ > 0"));
                }
                if detuning == 0.0 || detuning == fine_structure || !detuning.is_finite() {
                    return Err(Error::domain("Raman detuning must avoid 0 and ω_F"));
                }
                if !(mu_cw >= 0.0 && mu_fc >= 0.0) {
                    return Err(Error::domain("Stark coefficients must be non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn transition(&self) -> TransitionKind {
        match self {
            QubitSpec::Optical { .. } => TransitionKind::OnePhoton,
            QubitSpec::Hyperfine { .. } => TransitionKind::TwoPhoton,
        }
    }
}

/// Detuning minimising Raman scattering, `ω_F/(1+√2)`.
pub fn optimal_detuning(fine_structure: f64) -> f64 {
    fine_structure / (1.0 + 2f64.sqrt())
}

/// Dephasing and amplitude noise-field PSDs.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannelPsd {
    pub s_z: PiecewisePsd,
    pub s_theta: PiecewisePsd,
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `S_θ = κ Ω_c² S_RIN` with κ = 1/16 (one photon) or 1/4 (two photon).
pub fn rin_to_rabi_psd(s_rin: &PiecewisePsd, kind: TransitionKind, rabi: f64) -> Result<PiecewisePsd> {
    check_rate("Rabi frequency", rabi)?;
    s_rin.scaled(kind.kappa() * rabi * rabi)
}

/// `S_z = S_LO / 4`
pub fn freq_to_dephasing_psd(s_lo: &PiecewisePsd) -> Result<PiecewisePsd> {
    s_lo.scaled(0.25)
}

/// Dephasing from a cw Stark shift `Δ_AC = μ_cw Ω`: `(μ_cw Ω / 2)² S_RIN`.
pub fn stark_psd_cw(s_rin: &PiecewisePsd, rabi: f64, mu_cw: f64) -> Result<PiecewisePsd> {
    check_rate("Rabi frequency", rabi)?;
    if !(mu_cw >= 0.0) {
        return Err(Error::domain("μ_cw must be non-negative"));
    }
    let k = 0.5 * mu_cw * rabi;
    s_rin.scaled(k * k)
}

/// Dephasing from a comb Stark shift. The shift fluctuates as
/// `δΔ = 2 μ_fc Ω′² δI/I`; with `β_z = δΔ/2` the PSD is `(μ_fc Ω′²)² S_RIN`.
pub fn stark_psd_fc(s_rin: &PiecewisePsd, rabi: f64, mu_fc: f64) -> Result<PiecewisePsd> {
    check_rate("Rabi frequency", rabi)?;
    if !(mu_fc >= 0.0) {
        return Err(Error::domain("μ_fc must be non-negative"));
    }
    s_rin.scaled((mu_fc * rabi * rabi).powi(2))
}

/// The cw Stark term is below the Rabi-noise term for a π-pulse with white
/// RIN (Taylor filter forms) iff `μ_cw < √((π²+4)/8)`.
pub fn stark_cw_threshold() -> f64 {
    ((PI * PI + 4.0) / 8.0).sqrt()
}

pub fn stark_cw_negligible(mu_cw: f64) -> bool {
    mu_cw < stark_cw_threshold()
}

/// `μ_fc < √((π²+4)/32) / Ω′ ≈ 0.65/Ω′`
pub fn stark_fc_threshold(rabi: f64) -> f64 {
    ((PI * PI + 4.0) / 32.0).sqrt() / rabi
}

pub fn stark_fc_negligible(mu_fc: f64, rabi: f64) -> bool {
    mu_fc < stark_fc_threshold(rabi)
}

/// Drive parameters relevant to noise coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    /// Ω, rad/s
    pub rabi: f64,
    /// Stark source for Raman drives (ignored for optical qubits)
    pub stark: StarkSource,
}

/// Builds `S_z = ¼S_LO + Stark` and `S_θ` for the given qubit. Optical
/// qubits on resonance carry no Stark term.
pub fn assemble_channels(
    s_lo: &PiecewisePsd,
    s_rin: &PiecewisePsd,
    qubit: &QubitSpec,
    drive: &Drive,
) -> Result<NoiseChannelPsd> {
    qubit.validate()?;
    let mut s_z = freq_to_dephasing_psd(s_lo)?;
    match *qubit {
        QubitSpec::Optical { .. } => {}
        QubitSpec::Hyperfine { mu_cw, mu_fc, .. } => {
            let stark = match drive.stark {
                StarkSource::ContinuousWave => stark_psd_cw(s_rin, drive.rabi, mu_cw)?,
                StarkSource::FrequencyComb => stark_psd_fc(s_rin, drive.rabi, mu_fc)?,
            };
            s_z = s_z.add(&stark)?;
        }
    }
    let s_theta = rin_to_rabi_psd(s_rin, qubit.transition(), drive.rabi)?;
    Ok(NoiseChannelPsd { s_z, s_theta })
}
