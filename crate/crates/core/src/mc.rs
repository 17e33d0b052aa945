// SPDX-License-Identifier: Apache-2.0

//! Time-domain validation: noise synthesis from a PSD and exact
//! piecewise-constant evolution of a driven two-level system.
//!
//! Hamiltonian: `H = ((Ω_k + w_k δΩ)/2)(cos φ_k σx + sin φ_k σy) + (δΔ/2) σz`,
//! with `w_k = Ω_k/Ω_max` (fractional amplitude noise).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{Channel, PulseSequence, SequenceFilter};
use crate::fidelity::{chi_integral, ChiBreakdown, ChiOptions};
use crate::psd::PiecewisePsd;
use crate::quadrature;

/// Name of the generator behind every seeded stream.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), realization seed = seed XOR k";

/// Uniformly sampled noise, sample `i` holding the value on `[i dt, (i+1) dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    pub samples: Vec<f64>,
    pub dt: f64,
    pub seed: u64,
}

impl NoiseTrace {
    pub fn zeros(len: usize, dt: f64) -> Self {
        Self {
            samples: vec![0.0; len],
            dt,
            seed: 0,
        }
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

/// Harmonic-superposition model of a PSD: one cosine per logarithmic cell,
/// carrying that cell's exact share of the variance.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicModel {
    cells: Vec<(f64, f64)>,
    /// `√(2 P_k)` with `P_k = (1/2π)∫_cell S dω`
    amplitudes: Vec<f64>,
    omega_max: f64,
}

impl HarmonicModel {
    pub fn new(psd: &PiecewisePsd, cells_per_decade: usize) -> Result<Self> {
        let band = psd.band();
        if !(band.lo > 0.0) {
            return Err(Error::domain("noise synthesis needs a band starting above ω = 0"));
        }
        if cells_per_decade == 0 {
            return Err(Error::domain("need at least one synthesis cell per decade"));
        }
        let mut edges = quadrature::log_grid(band.lo, band.hi, cells_per_decade);
        edges.extend(psd.segment_edges());
        let edges = quadrature::merge_knots(edges, band.lo, band.hi);
        let mut cells = Vec::with_capacity(edges.len() - 1);
        let mut amplitudes = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let power = psd.integrate(w[0], w[1])? / (2.0 * PI);
            cells.push((w[0], w[1]));
            amplitudes.push((2.0 * power).sqrt());
        }
        Ok(Self {
            cells,
            amplitudes,
            omega_max: band.hi,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Target variance `(1/2π)∫S dω`.
    pub fn variance(&self) -> f64 {
        self.amplitudes.iter().map(|a| 0.5 * a * a).sum()
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// One realisation: random frequency within each cell, uniform phase.
    pub fn realize<R: Rng>(&self, rng: &mut R, len: usize, dt: f64) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&(lo, hi), &a) in self.cells.iter().zip(&self.amplitudes) {
            let omega = lo + (hi - lo) * rng.random::<f64>();
            let phase = 2.0 * PI * rng.random::<f64>();
            if a == 0.0 {
                continue;
            }
            let step = Complex64::from_polar(1.0, omega * dt);
            let mut z = Complex64::new(0.0, 0.0);
            for (i, o) in out.iter_mut().enumerate() {
                // restart the rotation exactly every 512 steps to bound drift
                if i % 512 == 0 {
                    z = Complex64::from_polar(a, omega * (i as f64 + 0.5) * dt + phase);
                }
                *o += z.re;
                z *= step;
            }
        }
        out
    }
}

fn check_nyquist(omega_max: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain("time step must be positive"));
    }
    if dt >= PI / omega_max {
        return Err(Error::domain(format!(
            "time step {dt} s violates Nyquist for ω_max = {omega_max} rad/s (need dt < {})",
            PI / omega_max
        )));
    }
    Ok(())
}

/// Synthesises one noise trace of at least `duration` seconds.
pub fn synthesize_noise(psd: &PiecewisePsd, duration: f64, dt: f64, seed: u64) -> Result<NoiseTrace> {
    let model = HarmonicModel::new(psd, 50)?;
    synthesize_from_model(&model, duration, dt, seed)
}

pub fn synthesize_from_model(model: &HarmonicModel, duration: f64, dt: f64, seed: u64) -> Result<NoiseTrace> {
    check_nyquist(model.omega_max, dt)?;
    if !(duration > 0.0) {
        return Err(Error::domain("trace duration must be positive"));
    }
    let len = (duration / dt).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(NoiseTrace {
        samples: model.realize(&mut rng, len, dt),
        dt,
        seed,
    })
}

type Mat2 = [[Complex64; 2]; 2];

fn identity() -> Mat2 {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[o, z], [z, o]]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// `exp(−i t (a·σ))`
fn su2(a: [f64; 3], t: f64) -> Mat2 {
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if norm == 0.0 {
        return identity();
    }
    let (s, c) = (norm * t).sin_cos();
    let k = s / norm;
    let i = Complex64::new(0.0, 1.0);
    [
        [c - i * k * a[2], -i * k * Complex64::new(a[0], -a[1])],
        [-i * k * Complex64::new(a[0], a[1]), c + i * k * a[2]],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    pub unitary: [[Complex64; 2]; 2],
    /// `U|0⟩`
    pub state: [Complex64; 2],
    /// `|Tr(U₀† U)/2|²`
    pub gate_fidelity: f64,
    /// `|⟨ψ₀|ψ⟩|²` for the initial state |0⟩
    pub state_fidelity: f64,
}

fn propagate(seq: &PulseSequence, detuning: Option<&NoiseTrace>, rabi_noise: Option<&NoiseTrace>, dt: f64) -> Result<Mat2> {
    let total = seq.duration();
    let ticks = (total / dt).ceil() as usize;
    for tr in [detuning, rabi_noise].into_iter().flatten() {
        if tr.samples.len() < ticks {
            return Err(Error::domain(format!(
                "noise trace covers {} s, sequence needs {} s",
                tr.duration(),
                total
            )));
        }
        if (tr.dt - dt).abs() > 1e-12 * dt {
            return Err(Error::domain("noise trace sampled at a different time step"));
        }
    }
    let max_rabi = seq.max_rabi();
    let mut u = identity();
    let mut t0 = 0.0;
    for seg in seq.segments() {
        let t1 = t0 + seg.duration;
        let weight = seg.rabi / max_rabi;
        let (c, s) = (seg.phase.cos(), seg.phase.sin());
        let mut t = t0;
        while t < t1 {
            let mut tick = (t / dt).floor() as usize;
            if (tick + 1) as f64 * dt <= t {
                // t sits on a tick boundary up to rounding
                tick += 1;
            }
            let tick = tick.min(ticks.saturating_sub(1));
            let next = ((tick + 1) as f64 * dt).min(t1);
            let next = if next > t { next } else { t1 };
            let d = detuning.map_or(0.0, |tr| tr.samples[tick]);
            let e = rabi_noise.map_or(0.0, |tr| tr.samples[tick]);
            let half = 0.5 * (seg.rabi + weight * e);
            let step = su2([half * c, half * s, 0.5 * d], next - t);
            u = mul(&step, &u);
            t = next;
        }
        t0 = t1;
    }
    Ok(u)
}

/// Evolves `seq` under the given noise traces (either may be absent) with
/// exact 2×2 exponentials on every interval where control and noise are
/// constant.
pub fn evolve(seq: &PulseSequence, detuning: Option<&NoiseTrace>, rabi_noise: Option<&NoiseTrace>, dt: f64) -> Result<Evolution> {
    if !(dt > 0.0) {
        return Err(Error::domain("time step must be positive"));
    }
    let u = propagate(seq, detuning, rabi_noise, dt)?;
    let u0 = propagate(seq, None, None, seq.duration())?;
    // Tr(U₀† U)
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            tr += u0[k][i].conj() * u[k][i];
        }
    }
    let state = [u[0][0], u[1][0]];
    let target = [u0[0][0], u0[1][0]];
    let overlap = target[0].conj() * state[0] + target[1].conj() * state[1];
    Ok(Evolution {
        unitary: u,
        state,
        gate_fidelity: (0.5 * tr).norm_sqr(),
        state_fidelity: overlap.norm_sqr(),
    })
}

/// Sequence plus the noise it is exposed to. PSDs are those of the
/// physical fields: `S_Δ` (detuning, = LO frequency noise) and `S_Ω`.
#[derive(Debug, Clone)]
pub struct McScenario {
    pub sequence: PulseSequence,
    pub detuning: Option<PiecewisePsd>,
    pub rabi_noise: Option<PiecewisePsd>,
    pub dt: f64,
    pub cells_per_decade: usize,
}

impl McScenario {
    /// Filter-function prediction for the same noise (`S_z = S_Δ/4`,
    /// `S_θ = S_Ω/4`).
    pub fn filter_prediction(&self, opts: ChiOptions) -> Result<ChiBreakdown> {
        let mut parts = Vec::with_capacity(2);
        for (psd, ch) in [(&self.detuning, Channel::Dephasing), (&self.rabi_noise, Channel::Amplitude)] {
            parts.push(match psd {
                Some(s) => chi_integral(&s.scaled(0.25)?, &SequenceFilter::new(&self.sequence, ch), None, opts)?,
                None => crate::fidelity::ChiIntegral {
                    value: 0.0,
                    abs_error: 0.0,
                    evaluations: 0,
                    converged: true,
                    decades: vec![],
                },
            });
        }
        let a = parts.pop().expect("two channels");
        let d = parts.pop().expect("two channels");
        Ok(ChiBreakdown::from_parts(d, a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    /// mean gate fidelity `|Tr(U₀†U)/2|²`
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub mean_state_fidelity: f64,
    pub state_std_error: f64,
    pub n_realizations: usize,
    pub seed: u64,
    pub rng: String,
    pub per_realization: Vec<f64>,
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `n` independent realisations (in parallel; realisation k seeded
/// with `seed ^ k`) and averages them in index order.
pub fn ensemble_fidelity(scenario: &McScenario, n: usize, seed: u64) -> Result<EnsembleResult> {
    if n < 2 {
        return Err(Error::domain("ensemble needs at least two realisations"));
    }
    let dt = scenario.dt;
    let tau = scenario.sequence.duration();
    let models: Vec<Option<HarmonicModel>> = [&scenario.detuning, &scenario.rabi_noise]
        .into_iter()
        .map(|p| p.as_ref().map(|s| HarmonicModel::new(s, scenario.cells_per_decade)).transpose())
        .collect::<Result<_>>()?;
    for m in models.iter().flatten() {
        check_nyquist(m.omega_max(), dt)?;
    }
    let len = (tau / dt).ceil() as usize;
    let runs: Vec<(f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let s = seed ^ k;
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let traces: Vec<Option<NoiseTrace>> = models
                .iter()
                .map(|m| {
                    m.as_ref().map(|m| NoiseTrace {
                        samples: m.realize(&mut rng, len, dt),
                        dt,
                        seed: s,
                    })
                })
                .collect();
            let ev = evolve(&scenario.sequence, traces[0].as_ref(), traces[1].as_ref(), dt)?;
            Ok((ev.gate_fidelity, ev.state_fidelity))
        })
        .collect::<Result<_>>()?;
    let gate: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let state: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let (mean_fidelity, std_error) = mean_and_stderr(&gate);
    let (mean_state_fidelity, state_std_error) = mean_and_stderr(&state);
    Ok(EnsembleResult {
        mean_fidelity,
        std_error,
        mean_state_fidelity,
        state_std_error,
        n_realizations: n,
        seed,
        rng: RNG_NAME.to_string(),
        per_realization: gate,
    })
}
