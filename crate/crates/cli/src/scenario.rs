// SPDX-License-Identifier: Apache-2.0

//! Turns a parsed config into engine objects.

use laserchi_core::constants::optical_angular_frequency;
use laserchi_core::coupling::{QubitSpec, StarkSource};
use laserchi_core::fidelity::{required_power, ChiOptions, Operation};
use laserchi_core::filter::{PulseSegment, PulseSequence};
use laserchi_core::psd::*;

use crate::config::{Loaded, TableRef};
use crate::error::CliError;

pub struct Built {
    pub band: Band,
    /// free-running LO frequency noise
    pub free_running: PiecewisePsd,
    pub h_b: f64,
    pub preset: Option<LaserPreset>,
    pub qubit: QubitSpec,
    pub stark: StarkSource,
    pub rabi: Option<f64>,
    pub chi: ChiOptions,
    pub bump: Option<ServoBump>,
}

fn load_table(l: &Loaded, t: &TableRef, band: Band) -> Result<PiecewisePsd, CliError> {
    let fu = match t.frequency_unit.as_str() {
        "hz" => FrequencyUnit::Hz,
        _ => FrequencyUnit::RadS,
    };
    let pu = match t.psd_unit.as_str() {
        "db_per_hz" => PsdUnit::DbPerHz,
        _ => PsdUnit::Linear,
    };
    let path = l.resolve(&t.path);
    let table = Table::from_csv_path(&path, fu, pu).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(PiecewisePsd::tabulated(table, band, 0.0))
}

pub fn qubit(l: &Loaded) -> QubitSpec {
    let q = &l.scenario.qubit;
    match q.kind.as_str() {
        "hyperfine" => {
            let QubitSpec::Hyperfine {
                linewidth,
                fine_structure,
                detuning,
                wavelength,
                mu_cw,
                mu_fc,
            } = QubitSpec::hyperfine_ca43()
            else {
                unreachable!()
            };
            let fine_structure = q.fine_structure_rad_s.unwrap_or(fine_structure);
            let detuning = q.detuning_rad_s.unwrap_or(if q.fine_structure_rad_s.is_some() {
                laserchi_core::coupling::optimal_detuning(fine_structure)
            } else {
                detuning
            });
            QubitSpec::Hyperfine {
                linewidth: q.linewidth_rad_s.unwrap_or(linewidth),
                fine_structure,
                detuning,
                wavelength: q.wavelength_m.unwrap_or(wavelength),
                mu_cw: q.mu_cw.unwrap_or(mu_cw),
                mu_fc: q.mu_fc.unwrap_or(mu_fc),
            }
        }
        _ => {
            let QubitSpec::Optical { lifetime, wavelength } = QubitSpec::optical_ca40() else {
                unreachable!()
            };
            QubitSpec::Optical {
                lifetime: q.lifetime_s.unwrap_or(lifetime),
                wavelength: q.wavelength_m.unwrap_or(wavelength),
            }
        }
    }
}

pub fn wavelength(q: &QubitSpec) -> f64 {
    match *q {
        QubitSpec::Optical { wavelength, .. } | QubitSpec::Hyperfine { wavelength, .. } => wavelength,
    }
}

/// Rabi frequency reached with `power` and `waist` (inverts the power law
/// of [`required_power`]).
pub fn rabi_from_power(q: &QubitSpec, power: f64, waist: f64) -> Result<f64, CliError> {
    let p1 = required_power(q, 1.0, waist)?;
    let p10 = required_power(q, 10.0, waist)?;
    let exponent = (p10 / p1).log10();
    Ok((power / p1).powf(1.0 / exponent))
}

pub fn build(l: &Loaded) -> Result<Built, CliError> {
    let s = &l.scenario;
    let default = Band::default();
    let band = Band::new(
        s.laser.band_lo_rad_s.unwrap_or(default.lo),
        s.laser.band_hi_rad_s.unwrap_or(default.hi),
    )
    .map_err(|e| CliError::Config(format!("key `laser.band_*`: {e}")))?;
    let preset = match &s.laser.preset {
        Some(p) => Some(LaserPreset::get(p.parse()?)),
        None => None,
    };
    let floor = s.laser.quantum_floor_rad2_s2_per_hz;
    let free_running = match (&preset, &s.laser.frequency_psd) {
        (Some(p), _) => freq_noise_model(&p.frequency, floor, band)?,
        (None, Some(t)) => load_table(l, t, band)?.with_floor(floor),
        (None, None) => unreachable!("checked at load"),
    };
    let h_b = match (s.laser.h_b_rad2_s2_per_hz, &preset) {
        (Some(h), _) => h,
        (None, Some(p)) => p.frequency.white_level,
        // tabulated: level at the top of the band
        (None, None) => free_running.value(band.hi * (1.0 - 1e-12)),
    };
    let qubit = qubit(l);
    qubit.validate().map_err(|e| CliError::Config(format!("section `qubit`: {e}")))?;
    let (rabi, stark) = match &s.drive {
        Some(d) => {
            let stark = if d.stark == "fc" {
                StarkSource::FrequencyComb
            } else {
                StarkSource::ContinuousWave
            };
            let rabi = match (d.rabi_rad_s, d.power_w, d.waist_m) {
                (Some(r), _, _) => r,
                (None, Some(p), Some(w)) => rabi_from_power(&qubit, p, w)?,
                _ => unreachable!("checked at load"),
            };
            (Some(rabi), stark)
        }
        None => (None, StarkSource::ContinuousWave),
    };
    let t = s.tolerances;
    let chi = ChiOptions {
        rel_tol: t.chi_rel_tol,
        max_evals: t.chi_max_evals,
        knots_per_decade: t.knots_per_decade,
        ..ChiOptions::default()
    };
    let bump = match (s.servo.bump_width_rad_s, s.servo.bump_ratio) {
        (Some(width), Some(ratio)) => Some(ServoBump { width, ratio }),
        _ => None,
    };
    Ok(Built {
        band,
        free_running,
        h_b,
        preset,
        qubit,
        stark,
        rabi,
        chi,
        bump,
    })
}

/// Relative intensity noise at the power that sets the shot-noise clamp.
pub fn rin(l: &Loaded, b: &Built) -> Result<Option<PiecewisePsd>, CliError> {
    let s = &l.scenario;
    if !s.laser.include_rin {
        return Ok(None);
    }
    if let Some(t) = &s.laser.rin_psd {
        return Ok(Some(load_table(l, t, b.band)?));
    }
    let preset = b.preset.expect("checked at load");
    let power = s
        .laser
        .power_w
        .or(s.drive.as_ref().and_then(|d| d.power_w))
        .ok_or_else(|| CliError::Config("key `laser.power_w`: preset RIN needs the mean optical power".into()))?;
    Ok(Some(rin_model(&preset.rin, power, optical_angular_frequency(wavelength(&b.qubit)), b.band)?))
}

pub enum Op {
    Named(Operation),
    Custom(PulseSequence),
}

pub fn operation(l: &Loaded) -> Result<Op, CliError> {
    let o = &l.scenario.operation;
    Ok(match o.kind.as_str() {
        "sk1" => Op::Named(Operation::Sk1),
        "custom" => Op::Custom(
            PulseSequence::new(
                o.segments
                    .iter()
                    .map(|s| PulseSegment {
                        rabi: s.rabi_rad_s,
                        phase: s.phase_rad,
                        duration: s.duration_s,
                    })
                    .collect(),
            )
            .map_err(|e| CliError::Config(format!("key `operation.segments`: {e}")))?,
        ),
        _ => Op::Named(Operation::Primitive),
    })
}

impl Op {
    pub fn sequence(&self, rabi: f64) -> Result<PulseSequence, CliError> {
        Ok(match self {
            Op::Named(op) => op.sequence(rabi)?,
            Op::Custom(seq) => seq.clone(),
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Op::Named(Operation::Primitive) => "primitive",
            Op::Named(Operation::Sk1) => "sk1",
            Op::Custom(_) => "custom",
        }
    }
}
