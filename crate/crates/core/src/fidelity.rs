// SPDX-License-Identifier: Apache-2.0

//! Fidelity from spectral overlap, analytic bounds and landscape sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{optical_angular_frequency, HBAR, SPEED_OF_LIGHT};
use crate::coupling::{assemble_channels, Drive, NoiseChannelPsd, QubitSpec, StarkSource};
use crate::error::{Error, Result};
use crate::filter::{make_sk1, Channel, FilterFunction, GeneralFilter, PiAmplitude, PiDephasing, PulseSequence, SequenceFilter};
use crate::psd::{apply_servo, Band, PiecewisePsd, ServoBump, ServoModel};
use crate::quadrature::{self, QuadOptions};

/// `½(1 + e^{−χ})`
pub fn fidelity_from_chi(chi: f64) -> f64 {
    1.0 - infidelity_from_chi(chi)
}

/// `½(1 − e^{−χ})`, accurate for small χ.
pub fn infidelity_from_chi(chi: f64) -> f64 {
    -0.5 * (-chi).exp_m1()
}

#[derive(Debug, Clone, Copy)]
pub struct ChiOptions {
    pub rel_tol: f64,
    pub max_evals: usize,
    pub knots_per_decade: usize,
    /// Replace the filter function by its cycle average above its onset.
    pub average_high_frequencies: bool,
}

impl Default for ChiOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_evals: 4_000_000,
            knots_per_decade: 10,
            average_high_frequencies: true,
        }
    }
}

/// Contribution of one frequency decade to χ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeContribution {
    /// log10 of the decade's lower edge (rad/s)
    pub decade: i32,
    pub chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiIntegral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub decades: Vec<DecadeContribution>,
}

const MAX_OSCILLATION_PANELS: usize = 200_000;

/// `χ = (1/π) ∫ S(ω) F(ω) / ω² dω` over `band` (default: the PSD band).
pub fn chi_integral(s: &PiecewisePsd, f: &dyn FilterFunction, band: Option<Band>, opts: ChiOptions) -> Result<ChiIntegral> {
    let psd_band = s.band();
    let band = band.unwrap_or(psd_band);
    let (lo, hi) = (band.lo.max(psd_band.lo), band.hi.min(psd_band.hi));
    if !(lo > 0.0) {
        return Err(Error::domain("χ integral needs a positive infrared cutoff"));
    }
    if hi <= lo {
        return Err(Error::domain("χ integration band is empty"));
    }
    let onset = if opts.average_high_frequencies {
        f.averaging_onset().unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };

    let mut pts = quadrature::log_grid(lo, hi, opts.knots_per_decade);
    pts.extend(s.breakpoints());
    pts.extend(f.knots());
    let (d0, d1) = (lo.log10().ceil() as i32, hi.log10().floor() as i32);
    pts.extend((d0..=d1).map(|d| 10f64.powi(d)));
    if onset.is_finite() {
        pts.push(onset);
    }
    if let Some((start, period)) = f.oscillation() {
        let (a, b) = (start.max(lo), onset.min(hi));
        if b > a && period > 0.0 {
            let n = (((b - a) / period).ceil() as usize).min(MAX_OSCILLATION_PANELS);
            pts.extend((1..n).map(|i| a + (b - a) * i as f64 / n as f64));
        }
    }
    let knots = quadrature::merge_knots(pts, lo, hi);

    let integrand = |w: f64| {
        let ff = if w >= onset { f.averaged_value(w) } else { f.value(w) };
        s.value(w) * ff / (PI * w * w)
    };
    let r = quadrature::integrate(integrand, &knots, QuadOptions {
        rel_tol: opts.rel_tol,
        abs_tol: 0.0,
        max_evals: opts.max_evals,
    })
    .map_err(|e| match e {
        Error::Numerical { detail, .. } => Error::numerical("χ", detail),
        other => other,
    })?;
    if !r.value.is_finite() || r.value < 0.0 {
        return Err(Error::numerical("χ", format!("integral evaluated to {}", r.value)));
    }

    let mut decades: Vec<DecadeContribution> = Vec::new();
    for p in &r.panels {
        let d = (0.5 * (p.lo + p.hi)).log10().floor() as i32;
        match decades.last_mut() {
            Some(last) if last.decade == d => last.chi += p.value,
            _ => decades.push(DecadeContribution { decade: d, chi: p.value }),
        }
    }
    Ok(ChiIntegral {
        value: r.value,
        abs_error: r.abs_error,
        evaluations: r.evaluations,
        converged: r.converged,
        decades,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiBreakdown {
    pub chi_dephasing: f64,
    pub chi_amplitude: f64,
    pub chi_total: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub decades_dephasing: Vec<DecadeContribution>,
    pub decades_amplitude: Vec<DecadeContribution>,
}

impl ChiBreakdown {
    pub fn from_parts(dephasing: ChiIntegral, amplitude: ChiIntegral) -> Self {
        let total = dephasing.value + amplitude.value;
        Self {
            chi_dephasing: dephasing.value,
            chi_amplitude: amplitude.value,
            chi_total: total,
            fidelity: fidelity_from_chi(total),
            infidelity: infidelity_from_chi(total),
            decades_dephasing: dephasing.decades,
            decades_amplitude: amplitude.decades,
        }
    }
}

/// χ of both noise channels for the given filter functions.
pub fn chi_channels(
    channels: &NoiseChannelPsd,
    dephasing: &dyn FilterFunction,
    amplitude: &dyn FilterFunction,
    opts: ChiOptions,
) -> Result<ChiBreakdown> {
    let d = chi_integral(&channels.s_z, dephasing, None, opts)?;
    let a = chi_integral(&channels.s_theta, amplitude, None, opts)?;
    Ok(ChiBreakdown::from_parts(d, a))
}

/// χ for the step PSD (`h_a` below ω_srv, `h_b` above; `S_z = h/4`) and the
/// piecewise filter, integrated exactly over `(0, ∞)`.
pub fn chi_analytic_servoed(gf: &GeneralFilter, h_a: f64, h_b: f64, servo_bandwidth: f64) -> Result<f64> {
    gf.require_integrable()?;
    if !(h_a >= 0.0 && h_b >= 0.0 && servo_bandwidth > 0.0) {
        return Err(Error::domain("need h_a, h_b ≥ 0 and ω_srv > 0"));
    }
    let n = gf.order as f64;
    let wc = gf.cutoff;
    let pre = gf.c_b / (4.0 * PI);
    if servo_bandwidth >= wc {
        Ok(pre * (n * h_a / ((n - 1.0) * wc) + (h_b - h_a) / servo_bandwidth))
    } else {
        let x = (servo_bandwidth / wc).powf(n - 1.0);
        Ok(pre * (n * h_b - (h_b - h_a) * x) / ((n - 1.0) * wc))
    }
}

/// The fully `h_b`-limited value `n c_b h_b / (4π(n−1)ω_cut)`.
pub fn chi_hb_limited(gf: &GeneralFilter, h_b: f64) -> Result<f64> {
    gf.require_integrable()?;
    let n = gf.order as f64;
    Ok(n * gf.c_b * h_b / (4.0 * PI * (n - 1.0) * gf.cutoff))
}

/// Servo bandwidth beyond which the in-loop level dominates χ:
/// `ω_χ = (n−1)ω_cut/n · (h_b/h_a − 1)`; infinite for `h_a = 0`.
pub fn chi_separation_servo(gf: &GeneralFilter, h_a: f64, h_b: f64) -> Result<f64> {
    gf.require_integrable()?;
    if !(h_a >= 0.0 && h_b >= h_a) {
        return Err(Error::domain("χ-separation needs h_b ≥ h_a ≥ 0"));
    }
    if h_a == 0.0 {
        return Ok(if h_b == 0.0 { 0.0 } else { f64::INFINITY });
    }
    let n = gf.order as f64;
    Ok((n - 1.0) * gf.cutoff / n * (h_b / h_a - 1.0))
}

/// PSD threshold `h_a (1 + n ω / ((n−1) ω_cut))`.
pub fn chi_separation_threshold(gf: &GeneralFilter, h_a: f64, omega: f64) -> f64 {
    let n = gf.order as f64;
    h_a * (1.0 + n * omega / ((n - 1.0) * gf.cutoff))
}

/// π-pulse χ-separation line, `h_a (2ω/Ω + 1)`.
pub fn chi_separation_line(h_a: f64, rabi: f64, omega: f64) -> f64 {
    h_a * (2.0 * omega / rabi + 1.0)
}

/// Spontaneous-emission error floor.
pub fn se_floor(q: &QubitSpec, rabi: f64) -> Result<f64> {
    q.validate()?;
    match *q {
        QubitSpec::Optical { lifetime, .. } => {
            if !(rabi > 0.0) {
                return Err(Error::domain("Rabi frequency must be positive"));
            }
            Ok(-0.5 * (-3.0 * PI / (4.0 * rabi * lifetime)).exp_m1())
        }
        QubitSpec::Hyperfine {
            linewidth,
            fine_structure,
            detuning,
            ..
        } => {
            let g = 3.0 / fine_structure - 1.0 / detuning + 2.0 / (detuning - fine_structure);
            Ok(linewidth * PI * g.abs())
        }
    }
}

/// Largest in-loop level keeping χ/2 below ε at ω_srv → ∞:
/// `8π(n−1) ε ω_cut / (n c_b)`.
pub fn ha_limit(gf: &GeneralFilter, epsilon: f64) -> Result<f64> {
    gf.require_integrable()?;
    if !(epsilon >= 0.0) {
        return Err(Error::domain("ε must be non-negative"));
    }
    let n = gf.order as f64;
    Ok(8.0 * PI * (n - 1.0) * epsilon * gf.cutoff / (n * gf.c_b))
}

/// RIN analogue of [`ha_limit`] for `S_θ = κ Ω² S_RIN`.
pub fn ha_prime_limit(gf: &GeneralFilter, epsilon: f64, kappa: f64, rabi: f64) -> Result<f64> {
    if !(kappa > 0.0 && rabi > 0.0) {
        return Err(Error::domain("κ and Ω must be positive"));
    }
    Ok(ha_limit(gf, epsilon)? / (kappa * rabi * rabi))
}

/// `λ / (π w₀)`
pub fn numerical_aperture(wavelength: f64, waist: f64) -> f64 {
    wavelength / (PI * waist)
}

pub fn waist_for_na(wavelength: f64, na: f64) -> f64 {
    wavelength / (PI * na)
}

/// Optical power (W) needed to reach Rabi frequency Ω with beam waist w₀.
pub fn required_power(q: &QubitSpec, rabi: f64, waist: f64) -> Result<f64> {
    if !(waist > 0.0 && rabi > 0.0) {
        return Err(Error::domain("required power needs w₀ > 0 and Ω > 0"));
    }
    match *q {
        QubitSpec::Hyperfine { wavelength, .. } => {
            let eps = se_floor(q, rabi)?;
            let k = 2.0 * PI * waist / wavelength;
            Ok(2.0 * PI / (3.0 * eps) * k * k * HBAR * optical_angular_frequency(wavelength) * rabi)
        }
        QubitSpec::Optical { lifetime, wavelength } => {
            q.validate()?;
            let gamma = 1.0 / lifetime;
            Ok(8.0 * PI.powi(3) * HBAR * SPEED_OF_LIGHT / (5.0 * gamma * wavelength.powi(3)) * waist * waist * rabi * rabi)
        }
    }
}

/// Numerical-aperture bound below which shot-noise-limited intensity noise
/// stays under the SE floor, as quoted for each qubit kind.
pub fn na_bound(q: &QubitSpec) -> f64 {
    match q {
        QubitSpec::Hyperfine { .. } => 4.0 * (PI / 3.0).sqrt(),
        QubitSpec::Optical { .. } => (6.0 * PI / 5.0).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Primitive,
    Sk1,
}

impl Operation {
    pub fn sequence(self, rabi: f64) -> Result<PulseSequence> {
        match self {
            Operation::Primitive => PulseSequence::pi_pulse(rabi),
            Operation::Sk1 => make_sk1(PI, rabi),
        }
    }

    /// Exact first-order filter function of the operation's π rotation.
    pub fn filter(self, rabi: f64, channel: Channel) -> Result<Box<dyn FilterFunction>> {
        if !(rabi > 0.0 && rabi.is_finite()) {
            return Err(Error::domain("Rabi frequency must be positive"));
        }
        Ok(match (self, channel) {
            (Operation::Primitive, Channel::Dephasing) => Box::new(PiDephasing { rabi }),
            (Operation::Primitive, Channel::Amplitude) => Box::new(PiAmplitude { rabi }),
            (Operation::Sk1, ch) => Box::new(SequenceFilter::new(&make_sk1(PI, rabi)?, ch)),
        })
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Primitive => "primitive",
            Operation::Sk1 => "sk1",
        })
    }
}

impl FromStr for Operation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primitive" | "pi" => Ok(Self::Primitive),
            "sk1" => Ok(Self::Sk1),
            other => Err(Error::domain(format!("unknown operation `{other}` (primitive | sk1)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "h_b-limited")]
    HbLimited,
    #[serde(rename = "servo-limited")]
    ServoLimited,
    #[serde(rename = "h_a-limited")]
    HaLimited,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::HbLimited => "h_b-limited",
            Region::ServoLimited => "servo-limited",
            Region::HaLimited => "h_a-limited",
        })
    }
}

/// Region from the analytic boundaries `ω_srv = ω_cut` and `ω_srv = ω_χ`.
pub fn classify_region(gf: &GeneralFilter, h_a: f64, h_b: f64, servo_bandwidth: f64) -> Result<Region> {
    if servo_bandwidth < gf.cutoff {
        return Ok(Region::HbLimited);
    }
    let w_chi = chi_separation_servo(gf, h_a, h_b.max(h_a))?;
    Ok(if servo_bandwidth < w_chi {
        Region::ServoLimited
    } else {
        Region::HaLimited
    })
}

/// Intensity-noise part of a landscape scenario.
#[derive(Debug, Clone)]
pub struct RinCoupling {
    pub rin: PiecewisePsd,
    pub qubit: QubitSpec,
    pub stark: StarkSource,
}

/// Servoed-laser scenario swept over Rabi frequency, servo bandwidth and,
/// optionally, the free-running white level.
#[derive(Debug, Clone)]
pub struct LandscapeScenario {
    /// free-running LO frequency noise S_δω (rad/s)²/Hz
    pub free_running: PiecewisePsd,
    pub h_a: f64,
    /// free-running white level used for region labels
    pub h_b: f64,
    pub bump: Option<ServoBump>,
    pub operation: Operation,
    pub rin: Option<RinCoupling>,
    pub chi: ChiOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub rabi: f64,
    pub servo_bandwidth: f64,
    /// replaces the free-running PSD by a white level `h_b` (floor kept)
    pub h_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRow {
    pub rabi: f64,
    pub servo_bandwidth: f64,
    pub h_b: f64,
    pub chi_dephasing: f64,
    pub chi_amplitude: f64,
    pub chi_total: f64,
    pub infidelity: f64,
    pub region: Region,
}

impl LandscapeScenario {
    pub fn servoed_psd(&self, point: &SweepPoint) -> Result<PiecewisePsd> {
        let (fr, h_b) = match point.h_b {
            Some(h) => (
                PiecewisePsd::white(h, self.free_running.band())?.with_floor(self.free_running.floor()),
                h,
            ),
            None => (self.free_running.clone(), self.h_b),
        };
        let mut servo = ServoModel::new(self.h_a, h_b, point.servo_bandwidth)?;
        servo.bump = self.bump;
        apply_servo(&fr, &servo)
    }

    pub fn evaluate(&self, point: &SweepPoint) -> Result<LandscapeRow> {
        let s_lo = self.servoed_psd(point)?;
        let band = s_lo.band();
        let rin = match &self.rin {
            Some(r) => r.rin.clone(),
            None => PiecewisePsd::zero(band),
        };
        let qubit = self.rin.as_ref().map(|r| r.qubit).unwrap_or_else(QubitSpec::optical_ca40);
        let stark = self.rin.as_ref().map(|r| r.stark).unwrap_or(StarkSource::ContinuousWave);
        let channels = assemble_channels(&s_lo, &rin, &qubit, &Drive { rabi: point.rabi, stark })?;
        let deph = self.operation.filter(point.rabi, Channel::Dephasing)?;
        let d = chi_integral(&channels.s_z, deph.as_ref(), None, self.chi)?;
        let a = if self.rin.is_some() {
            let amp = self.operation.filter(point.rabi, Channel::Amplitude)?;
            chi_integral(&channels.s_theta, amp.as_ref(), None, self.chi)?.value
        } else {
            0.0
        };
        let h_b = point.h_b.unwrap_or(self.h_b);
        let total = d.value + a;
        Ok(LandscapeRow {
            rabi: point.rabi,
            servo_bandwidth: point.servo_bandwidth,
            h_b,
            chi_dephasing: d.value,
            chi_amplitude: a,
            chi_total: total,
            infidelity: infidelity_from_chi(total),
            region: classify_region(&GeneralFilter::pi_pulse(point.rabi)?, self.h_a, h_b, point.servo_bandwidth)?,
        })
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn sweep(scenario: &LandscapeScenario, points: &[SweepPoint]) -> Result<Vec<LandscapeRow>> {
    let band = scenario.free_running.band();
    for p in points {
        if !(p.servo_bandwidth > band.lo && p.servo_bandwidth < band.hi) {
            return Err(Error::domain(format!(
                "servo bandwidth {} outside PSD band ({}, {})",
                p.servo_bandwidth, band.lo, band.hi
            )));
        }
        if !(p.rabi > band.lo && p.rabi < band.hi) {
            return Err(Error::domain(format!("Rabi frequency {} outside PSD band", p.rabi)));
        }
    }
    points.par_iter().map(|p| scenario.evaluate(p)).collect()
}

/// Cartesian (Ω outer, ω_srv inner) grid.
pub fn grid_points(rabis: &[f64], bandwidths: &[f64]) -> Vec<SweepPoint> {
    rabis
        .iter()
        .flat_map(|&rabi| {
            bandwidths.iter().map(move |&servo_bandwidth| SweepPoint {
                rabi,
                servo_bandwidth,
                h_b: None,
            })
        })
        .collect()
}
