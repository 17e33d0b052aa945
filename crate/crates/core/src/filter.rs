// SPDX-License-Identifier: Apache-2.0

//! First-order filter functions for single-qubit operations.
//!
//! Normalisation: χ = (1/π)∫ S(ω) F(ω)/ω² dω, so F is dimensionless and
//! `F(ω) = ω² |Y(ω)|²` with `Y` the Fourier transform of the toggling-frame
//! error vector. A π-pulse has `∫₀^∞ F/ω² dω = π τ_π`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiple of the largest Rabi rate above which filter functions are
/// replaced by their cycle average in χ integrals.
pub const AVERAGING_ONSET_FACTOR: f64 = 1e3;

/// A filter function as consumed by the χ integral.
pub trait FilterFunction: Send + Sync {
    fn value(&self, omega: f64) -> f64;

    /// Frequencies where F has a kink, step or resonance.
    fn knots(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Above this frequency F oscillates quickly and the integral may use
    /// [`Self::averaged_value`] instead.
    fn averaging_onset(&self) -> Option<f64> {
        None
    }

    fn averaged_value(&self, omega: f64) -> f64 {
        self.value(omega)
    }

    /// `(start, period)`: F oscillates with angular period `period` for
    /// ω ≥ `start`.
    fn oscillation(&self) -> Option<(f64, f64)> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Dephasing,
    Amplitude,
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else {
        y.sin() / y
    }
}

/// Exact dephasing filter function of a primitive π-pulse about X.
///
/// Written as `π² r²(r²+1) sinc²(π(r−1)/2) / (r+1)²`, `r = ω/Ω`, which is the
/// resonant form with the removable singularity at ω = Ω cancelled.
pub fn ff_pi_dephasing_exact(omega: f64, rabi: f64) -> f64 {
    let r = omega / rabi;
    let s = sinc(0.5 * PI * (r - 1.0));
    PI * PI * r * r * (r * r + 1.0) * s * s / ((r + 1.0) * (r + 1.0))
}

/// Exact amplitude filter function of a primitive π-pulse, `4 sin²(ωτ_π/2)`.
pub fn ff_pi_amplitude_exact(omega: f64, rabi: f64) -> f64 {
    let s = (0.5 * PI * omega / rabi).sin();
    4.0 * s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiDephasing {
    pub rabi: f64,
}

impl FilterFunction for PiDephasing {
    fn value(&self, omega: f64) -> f64 {
        ff_pi_dephasing_exact(omega, self.rabi)
    }
    fn knots(&self) -> Vec<f64> {
        vec![self.rabi]
    }
    fn averaging_onset(&self) -> Option<f64> {
        Some(AVERAGING_ONSET_FACTOR * self.rabi)
    }
    fn averaged_value(&self, omega: f64) -> f64 {
        let (w2, o2) = (omega * omega, self.rabi * self.rabi);
        2.0 * w2 * (w2 + o2) / ((w2 - o2) * (w2 - o2))
    }
    fn oscillation(&self) -> Option<(f64, f64)> {
        Some((self.rabi, 2.0 * self.rabi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiAmplitude {
    pub rabi: f64,
}

impl FilterFunction for PiAmplitude {
    fn value(&self, omega: f64) -> f64 {
        ff_pi_amplitude_exact(omega, self.rabi)
    }
    fn knots(&self) -> Vec<f64> {
        vec![self.rabi]
    }
    fn averaging_onset(&self) -> Option<f64> {
        Some(AVERAGING_ONSET_FACTOR * self.rabi)
    }
    fn averaged_value(&self, _omega: f64) -> f64 {
        2.0
    }
    fn oscillation(&self) -> Option<(f64, f64)> {
        Some((self.rabi, 2.0 * self.rabi))
    }
}

/// Power law below a cut-off, flat above: `c_a ω^n` for ω < ω_cut, `c_b`
/// otherwise, with `c_a = c_b / ω_cut^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralFilter {
    pub c_b: f64,
    pub order: u32,
    pub cutoff: f64,
}

impl GeneralFilter {
    pub fn new(c_b: f64, order: u32, cutoff: f64) -> Result<Self> {
        if order < 1 {
            return Err(Error::domain("filter order must be ≥ 1"));
        }
        if !(c_b > 0.0 && c_b.is_finite() && cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::domain("filter plateau and cut-off must be positive"));
        }
        Ok(Self { c_b, order, cutoff })
    }

    /// Taylor piecewise dephasing form of a π-pulse: `4ω²/Ω²` then 4.
    pub fn pi_pulse(rabi: f64) -> Result<Self> {
        Self::new(4.0, 2, rabi)
    }

    pub fn c_a(&self) -> f64 {
        self.c_b / self.cutoff.powi(self.order as i32)
    }

    /// Errors for order 1, where χ integrals diverge at ω → 0.
    pub fn require_integrable(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::domain("filter order 1 makes the χ integral diverge (n/(n−1) pole)"));
        }
        Ok(())
    }
}

pub fn ff_piecewise(gf: &GeneralFilter, omega: f64) -> f64 {
    if omega < gf.cutoff {
        gf.c_b * (omega / gf.cutoff).powi(gf.order as i32)
    } else {
        gf.c_b
    }
}

impl FilterFunction for GeneralFilter {
    fn value(&self, omega: f64) -> f64 {
        ff_piecewise(self, omega)
    }
    fn knots(&self) -> Vec<f64> {
        vec![self.cutoff]
    }
}

/// Taylor piecewise amplitude form of a π-pulse: `π²ω²/Ω²` below Ω, 4 above.
/// Not continuous at Ω, so it is not a [`GeneralFilter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorPiAmplitude {
    pub rabi: f64,
}

impl FilterFunction for TaylorPiAmplitude {
    fn value(&self, omega: f64) -> f64 {
        if omega < self.rabi {
            let r = omega / self.rabi;
            PI * PI * r * r
        } else {
            4.0
        }
    }
    fn knots(&self) -> Vec<f64> {
        vec![self.rabi]
    }
}

/// Constant-amplitude, constant-phase control segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    /// Ω, rad/s
    pub rabi: f64,
    /// φ, rad
    pub phase: f64,
    /// s
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::domain("pulse sequence is empty"));
        }
        for s in &segments {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::domain(format!("segment duration must be positive, got {}", s.duration)));
            }
            if !(s.rabi >= 0.0 && s.rabi.is_finite() && s.phase.is_finite()) {
                return Err(Error::domain("segment Rabi rate must be finite and ≥ 0"));
            }
        }
        if segments.iter().all(|s| s.rabi == 0.0) {
            return Err(Error::domain("pulse sequence has no driven segment"));
        }
        Ok(Self { segments })
    }

    /// Rotation by θ about the equatorial axis at phase φ.
    pub fn primitive(theta: f64, phase: f64, rabi: f64) -> Result<Self> {
        if !(rabi > 0.0 && theta > 0.0) {
            return Err(Error::domain("primitive rotation needs θ > 0 and Ω > 0"));
        }
        Self::new(vec![PulseSegment {
            rabi,
            phase,
            duration: theta / rabi,
        }])
    }

    pub fn pi_pulse(rabi: f64) -> Result<Self> {
        Self::primitive(PI, 0.0, rabi)
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn max_rabi(&self) -> f64 {
        self.segments.iter().map(|s| s.rabi).fold(0.0, f64::max)
    }

    /// Segment start times.
    pub fn start_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let t0 = t;
                t += s.duration;
                t0
            })
            .collect()
    }
}

/// SK1 composite rotation: θ about X, then 2π rotations at phases ±φ with
/// `cos φ = −θ/4π`.
pub fn make_sk1(theta: f64, rabi: f64) -> Result<PulseSequence> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::domain(format!("SK1 target angle must lie in (0, π], got {theta}")));
    }
    if !(rabi > 0.0 && rabi.is_finite()) {
        return Err(Error::domain("SK1 Rabi rate must be positive"));
    }
    let phi = (-theta / (4.0 * PI)).acos();
    let full = 2.0 * PI / rabi;
    PulseSequence::new(vec![
        PulseSegment {
            rabi,
            phase: 0.0,
            duration: theta / rabi,
        },
        PulseSegment {
            rabi,
            phase: phi,
            duration: full,
        },
        PulseSegment {
            rabi,
            phase: -phi,
            duration: full,
        },
    ])
}

type Mat3 = [[f64; 3]; 3];
type Vec3 = [f64; 3];

fn rotation(axis: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let [x, y, z] = axis;
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn transpose_apply(m: &Mat3, v: Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|i| m[i][j] * v[i]).sum();
    }
    out
}

fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

/// `∫₀^T e^{iνs} ds`
fn phase_integral(nu: f64, t: f64) -> Complex64 {
    let half = 0.5 * nu * t;
    Complex64::from_polar(t * sinc(half), half)
}

#[derive(Debug, Clone, Copy)]
struct SegmentFrame {
    start: f64,
    duration: f64,
    rabi: f64,
    /// control axis n
    axis: Vec3,
    /// R_U for the propagator at the segment start
    before: Mat3,
    /// amplitude-noise weight Ω_k / Ω_max
    weight: f64,
}

/// First-order filter function of an arbitrary piecewise-constant sequence,
/// evaluated analytically segment by segment.
///
/// Amplitude noise is fractional: segment k couples with weight
/// `Ω_k / Ω_max`, so the error Hamiltonian is `β_θ(t)·(Ω_k/Ω_max)·n_k·σ`.
#[derive(Debug, Clone)]
pub struct SequenceFilter {
    channel: Channel,
    frames: Vec<SegmentFrame>,
    duration: f64,
    max_rabi: f64,
    high_freq_average: f64,
}

impl SequenceFilter {
    pub fn new(seq: &PulseSequence, channel: Channel) -> Self {
        let max_rabi = seq.max_rabi();
        let mut before = identity();
        let mut frames = Vec::with_capacity(seq.segments().len());
        for (seg, start) in seq.segments().iter().zip(seq.start_times()) {
            let axis = [seg.phase.cos(), seg.phase.sin(), 0.0];
            frames.push(SegmentFrame {
                start,
                duration: seg.duration,
                rabi: seg.rabi,
                axis,
                before,
                weight: seg.rabi / max_rabi,
            });
            before = mat_mul(&rotation(axis, seg.rabi * seg.duration), &before);
        }
        let high_freq_average = match channel {
            // toggling vector is continuous and unit length: |y(0)|² + |y(τ)|²
            Channel::Dephasing => 2.0,
            // sum of squared jumps of the (piecewise constant) toggling vector
            Channel::Amplitude => {
                let ys: Vec<Vec3> = frames
                    .iter()
                    .map(|f| {
                        let y = transpose_apply(&f.before, f.axis);
                        [y[0] * f.weight, y[1] * f.weight, y[2] * f.weight]
                    })
                    .collect();
                let mut prev = [0.0; 3];
                let mut sum = 0.0;
                for y in ys.iter().chain(std::iter::once(&[0.0; 3])) {
                    sum += (0..3).map(|i| (y[i] - prev[i]).powi(2)).sum::<f64>();
                    prev = *y;
                }
                sum
            }
        };
        Self {
            channel,
            frames,
            duration: seq.duration(),
            max_rabi,
            high_freq_average,
        }
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    /// Fourier transform of the toggling-frame error vector.
    pub fn toggling_transform(&self, omega: f64) -> [Complex64; 3] {
        let mut y = [Complex64::new(0.0, 0.0); 3];
        let z = [0.0, 0.0, 1.0];
        for f in &self.frames {
            let shift = Complex64::from_polar(1.0, omega * f.start);
            match self.channel {
                Channel::Dephasing => {
                    // y(s) = R^T [z cos(Ωs) − (n×z) sin(Ωs)]
                    let ep = phase_integral(omega + f.rabi, f.duration);
                    let em = phase_integral(omega - f.rabi, f.duration);
                    let cos_part = 0.5 * (ep + em);
                    let sin_part = (ep - em) / Complex64::new(0.0, 2.0);
                    let nxz = [f.axis[1], -f.axis[0], 0.0];
                    let zr = transpose_apply(&f.before, z);
                    let nr = transpose_apply(&f.before, nxz);
                    for i in 0..3 {
                        y[i] += shift * (cos_part * zr[i] - sin_part * nr[i]);
                    }
                }
                Channel::Amplitude => {
                    let e = phase_integral(omega, f.duration) * shift * f.weight;
                    let nr = transpose_apply(&f.before, f.axis);
                    for i in 0..3 {
                        y[i] += e * nr[i];
                    }
                }
            }
        }
        y
    }
}

impl FilterFunction for SequenceFilter {
    fn value(&self, omega: f64) -> f64 {
        let y = self.toggling_transform(omega);
        omega * omega * y.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
    fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.frames.iter().map(|f| f.rabi).filter(|r| *r > 0.0).collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }
    fn averaging_onset(&self) -> Option<f64> {
        Some(AVERAGING_ONSET_FACTOR * self.max_rabi)
    }
    fn averaged_value(&self, _omega: f64) -> f64 {
        self.high_freq_average
    }
    fn oscillation(&self) -> Option<(f64, f64)> {
        Some((self.max_rabi, 2.0 * PI / self.duration))
    }
}

/// Samples the first-order filter function of `seq` on `omegas`.
pub fn ff_sequence_numerical(seq: &PulseSequence, channel: Channel, omegas: &[f64]) -> Vec<f64> {
    let f = SequenceFilter::new(seq, channel);
    omegas.iter().map(|&w| f.value(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::log_grid;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    /// The textbook resonant form, singular at ω = Ω.
    fn dephasing_textbook(omega: f64, rabi: f64) -> f64 {
        let tau = PI / rabi;
        let e1 = Complex64::from_polar(1.0, omega * tau) + 1.0;
        let d = omega * omega - rabi * rabi;
        let a = omega * omega / d * e1;
        let b = Complex64::new(0.0, omega * rabi / d) * e1;
        a.norm_sqr() + b.norm_sqr()
    }

    #[test]
    fn dephasing_matches_textbook_form() {
        let rabi = 3.0e5;
        for w in log_grid(1.0, 1e10, 50) {
            if (w / rabi - 1.0).abs() < 1e-3 {
                continue;
            }
            assert!(rel(ff_pi_dephasing_exact(w, rabi), dephasing_textbook(w, rabi)) < 1e-9, "ω = {w}");
        }
    }

    #[test]
    fn dephasing_removable_singularity() {
        let rabi = 1e6;
        let at = ff_pi_dephasing_exact(rabi, rabi);
        assert!(rel(at, PI * PI / 2.0) < 1e-14);
        for side in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!(rel(ff_pi_dephasing_exact(rabi * side, rabi), at) < 1e-4);
        }
        // straddling the series switch
        let a = ff_pi_dephasing_exact(rabi * (1.0 + 0.99e-4 * 2.0 / PI), rabi);
        let b = ff_pi_dephasing_exact(rabi * (1.0 + 1.01e-4 * 2.0 / PI), rabi);
        assert!(rel(a, b) < 1e-5);
    }

    #[test]
    fn dephasing_limits() {
        let rabi = 1.0;
        assert!(ff_pi_dephasing_exact(1e-6, rabi) < 1e-11);
        let small = ff_pi_dephasing_exact(1e-3, rabi);
        assert!(rel(small, 4e-6) < 1e-5);
        // large ω: oscillates between 0 and ≈ 8, cycle average ≈ 2 ... ≤ 4 plateau for the envelope mean
        let grid: Vec<f64> = (0..20_000).map(|i| 1e4 + i as f64 * 1e-3).collect();
        let mean = grid.iter().map(|&w| ff_pi_dephasing_exact(w, rabi)).sum::<f64>() / grid.len() as f64;
        assert!((mean - 2.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn amplitude_values() {
        assert_eq!(ff_pi_amplitude_exact(0.0, 1.0), 0.0);
        assert!(rel(ff_pi_amplitude_exact(1.0, 1.0), 4.0) < 1e-15);
        for w in log_grid(1e-6, 1e-2, 10) {
            let taylor = PI * PI * w * w;
            assert!(rel(ff_pi_amplitude_exact(w, 1.0), taylor) < 0.01);
        }
    }

    #[test]
    fn piecewise_values() {
        let gf = GeneralFilter::pi_pulse(2.0).unwrap();
        assert_eq!(ff_piecewise(&gf, 1.0), 1.0);
        assert_eq!(ff_piecewise(&gf, 2.0), 4.0);
        assert!(rel(gf.c_a() * 2f64.powi(2), gf.c_b) < 1e-15);
        let n1 = GeneralFilter::new(4.0, 1, 1.0).unwrap();
        assert!(n1.require_integrable().is_err());
        assert!(GeneralFilter::new(4.0, 0, 1.0).is_err());
    }

    #[test]
    fn single_segment_matches_closed_forms() {
        let rabi = 2.0 * PI * 5e4;
        let seq = PulseSequence::pi_pulse(rabi).unwrap();
        let grid = log_grid(rabi * 1e-4, rabi * 1e4, 40);
        let deph = ff_sequence_numerical(&seq, Channel::Dephasing, &grid);
        let amp = ff_sequence_numerical(&seq, Channel::Amplitude, &grid);
        for (i, &w) in grid.iter().enumerate() {
            let d = ff_pi_dephasing_exact(w, rabi);
            let a = ff_pi_amplitude_exact(w, rabi);
            // closed forms have exact zeros; compare on the scale of the envelope
            assert!((deph[i] - d).abs() <= 1e-8 * d.max(1e-8 * (w / rabi).powi(2).min(1.0)), "dephasing ω = {w}");
            assert!((amp[i] - a).abs() <= 1e-8 * a.max(1e-8 * (w / rabi).powi(2).min(1.0)), "amplitude ω = {w}");
        }
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(PulseSequence::new(vec![]).is_err());
    }

    #[test]
    fn sk1_construction() {
        let rabi = 1e5;
        let sk1 = make_sk1(PI, rabi).unwrap();
        assert_eq!(sk1.segments().len(), 3);
        assert!(rel(sk1.duration(), 5.0 * PI / rabi) < 1e-15);
        assert!(rel(sk1.segments()[1].phase, (-0.25f64).acos()) < 1e-15);
        assert!(rel(sk1.segments()[2].phase, -(-0.25f64).acos()) < 1e-15);
        assert!(make_sk1(0.0, rabi).is_err());
        assert!(make_sk1(4.0, rabi).is_err());
    }

    #[test]
    fn sk1_amplitude_rolloff_is_steeper() {
        let rabi = 1.0;
        let sk1 = make_sk1(PI, rabi).unwrap();
        let prim = PulseSequence::pi_pulse(rabi).unwrap();
        let f_sk1 = SequenceFilter::new(&sk1, Channel::Amplitude);
        let f_pi = SequenceFilter::new(&prim, Channel::Amplitude);
        let (w1, w2) = (1e-4, 1e-3);
        let slope = (f_sk1.value(w2) / f_sk1.value(w1)).log10();
        assert!((slope - 4.0).abs() < 0.01, "SK1 amplitude slope {slope}");
        let slope_pi = (f_pi.value(w2) / f_pi.value(w1)).log10();
        assert!((slope_pi - 2.0).abs() < 0.01);
        assert!(f_sk1.value(1e-3) / f_pi.value(1e-3) < 1e-3);
    }

    #[test]
    fn sk1_dephasing_matches_primitive_at_low_frequency() {
        let sk1 = SequenceFilter::new(&make_sk1(PI, 1.0).unwrap(), Channel::Dephasing);
        let prim = PiDephasing { rabi: 1.0 };
        assert!(rel(sk1.value(1e-5), prim.value(1e-5)) < 1e-6);
    }

    #[test]
    fn high_frequency_averages() {
        let sk1 = make_sk1(PI, 1.0).unwrap();
        for ch in [Channel::Dephasing, Channel::Amplitude] {
            let f = SequenceFilter::new(&sk1, ch);
            let n = 40_000;
            let period = 2.0 * PI / sk1.duration();
            let mean = (0..n)
                .map(|i| f.value(5e3 + 50.0 * period * (i as f64 + 0.5) / n as f64))
                .sum::<f64>()
                / n as f64;
            assert!(rel(mean, f.averaged_value(5e3)) < 2e-3, "{ch:?}: {mean} vs {}", f.averaged_value(5e3));
        }
    }

    #[test]
    fn filters_non_negative() {
        let sk1 = SequenceFilter::new(&make_sk1(PI / 2.0, 3.0).unwrap(), Channel::Dephasing);
        for w in log_grid(1e-3, 1e4, 30) {
            assert!(sk1.value(w) >= 0.0);
            assert!(ff_pi_dephasing_exact(w, 3.0) >= 0.0);
        }
    }
}
