// SPDX-License-Identifier: Apache-2.0

//! Python bindings (`import laserchi`). Frequencies are angular (rad/s),
//! PSDs single-sided, as in the Rust crate.

use std::str::FromStr;

use laserchi_core::comb;
use laserchi_core::constants::optical_angular_frequency;
use laserchi_core::coupling::{assemble_channels, Drive, QubitSpec, StarkSource};
use laserchi_core::fidelity::{self as fid, ChiOptions, LandscapeScenario, Operation, RinCoupling};
use laserchi_core::filter::{self, Channel, FilterFunction, GeneralFilter, PulseSegment, PulseSequence, SequenceFilter};
use laserchi_core::mc::{ensemble_fidelity, McScenario};
use laserchi_core::psd::{self, Band, BetaLine, FrequencyUnit, LaserKind, LaserPreset, PiecewisePsd, PsdUnit, ServoModel, Table};
use laserchi_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for laserchi_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn band(lo: Option<f64>, hi: Option<f64>) -> PyResult<Band> {
    let d = Band::default();
    Band::new(lo.unwrap_or(d.lo), hi.unwrap_or(d.hi)).py()
}

fn channel(name: &str) -> PyResult<Channel> {
    match name {
        "dephasing" => Ok(Channel::Dephasing),
        "amplitude" => Ok(Channel::Amplitude),
        other => Err(PyValueError::new_err(format!("unknown channel `{other}` (dephasing | amplitude)"))),
    }
}

fn qubit(name: &str) -> PyResult<QubitSpec> {
    match name {
        "optical" => Ok(QubitSpec::optical_ca40()),
        "hyperfine" => Ok(QubitSpec::hyperfine_ca43()),
        other => Err(PyValueError::new_err(format!("unknown qubit `{other}` (optical | hyperfine)"))),
    }
}

fn stark(name: &str) -> PyResult<StarkSource> {
    match name {
        "cw" => Ok(StarkSource::ContinuousWave),
        "fc" => Ok(StarkSource::FrequencyComb),
        other => Err(PyValueError::new_err(format!("unknown Stark source `{other}` (cw | fc)"))),
    }
}

fn beta_line(name: &str) -> PyResult<BetaLine> {
    match name {
        "pi_omega" => Ok(BetaLine::PiOmega),
        "di_domenico" => Ok(BetaLine::DiDomenico),
        other => Err(PyValueError::new_err(format!("unknown line `{other}` (pi_omega | di_domenico)"))),
    }
}

fn operation(name: &str) -> PyResult<Operation> {
    Operation::from_str(name).py()
}

fn preset(name: &str) -> PyResult<LaserPreset> {
    Ok(LaserPreset::get(LaserKind::from_str(name).py()?))
}

/// Piecewise single-sided power spectral density on a finite band.
#[pyclass(frozen, skip_from_py_object, name = "Psd", module = "laserchi")]
#[derive(Clone)]
struct Psd(PiecewisePsd);

#[pymethods]
impl Psd {
    #[staticmethod]
    #[pyo3(signature = (level, lo=None, hi=None))]
    fn white(level: f64, lo: Option<f64>, hi: Option<f64>) -> PyResult<Self> {
        Ok(Self(PiecewisePsd::white(level, band(lo, hi)?).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (lo=None, hi=None))]
    fn zero(lo: Option<f64>, hi: Option<f64>) -> PyResult<Self> {
        Ok(Self(PiecewisePsd::zero(band(lo, hi)?)))
    }

    /// Pure flicker `level·corner/ω`.
    #[staticmethod]
    #[pyo3(signature = (level, corner, lo=None, hi=None))]
    fn flicker(level: f64, corner: f64, lo: Option<f64>, hi: Option<f64>) -> PyResult<Self> {
        Ok(Self(PiecewisePsd::flicker(level, corner, band(lo, hi)?).py()?))
    }

    /// Log-log interpolated table; the band defaults to the table's span.
    #[staticmethod]
    #[pyo3(signature = (omega, value, lo=None, hi=None, floor=0.0))]
    fn tabulated(omega: Vec<f64>, value: Vec<f64>, lo: Option<f64>, hi: Option<f64>, floor: f64) -> PyResult<Self> {
        let t = Table::new(omega, value).py()?;
        Self::from_table(t, lo, hi, floor)
    }

    #[staticmethod]
    #[pyo3(signature = (path, frequency_unit="hz", psd_unit="linear", lo=None, hi=None, floor=0.0))]
    fn from_csv(path: &str, frequency_unit: &str, psd_unit: &str, lo: Option<f64>, hi: Option<f64>, floor: f64) -> PyResult<Self> {
        let t = Table::from_csv_path(path, FrequencyUnit::from_str(frequency_unit).py()?, PsdUnit::from_str(psd_unit).py()?).py()?;
        Self::from_table(t, lo, hi, floor)
    }

    /// Free-running frequency noise of a preset laser, (rad/s)²/Hz.
    #[staticmethod]
    #[pyo3(signature = (preset_name, quantum_floor=0.0, lo=None, hi=None))]
    fn laser_frequency(preset_name: &str, quantum_floor: f64, lo: Option<f64>, hi: Option<f64>) -> PyResult<Self> {
        let p = preset(preset_name)?;
        Ok(Self(psd::freq_noise_model(&p.frequency, quantum_floor, band(lo, hi)?).py()?))
    }

    /// Relative intensity noise of a preset laser, 1/Hz.
    #[staticmethod]
    #[pyo3(signature = (preset_name, power_w, wavelength_m, lo=None, hi=None))]
    fn laser_rin(preset_name: &str, power_w: f64, wavelength_m: f64, lo: Option<f64>, hi: Option<f64>) -> PyResult<Self> {
        let p = preset(preset_name)?;
        let w = optical_angular_frequency(wavelength_m);
        Ok(Self(psd::rin_model(&p.rin, power_w, w, band(lo, hi)?).py()?))
    }

    #[getter]
    fn band(&self) -> (f64, f64) {
        let b = self.0.band();
        (b.lo, b.hi)
    }

    #[getter]
    fn floor(&self) -> f64 {
        self.0.floor()
    }

    fn __call__(&self, omega: f64) -> PyResult<f64> {
        self.0.try_value(omega).py()
    }

    fn sample(&self, omegas: Vec<f64>) -> Vec<f64> {
        self.0.sample(&omegas)
    }

    fn integrate(&self, lo: f64, hi: f64) -> PyResult<f64> {
        self.0.integrate(lo, hi).py()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }

    fn scaled(&self, k: f64) -> PyResult<Self> {
        Ok(Self(self.0.scaled(k).py()?))
    }

    fn with_floor(&self, floor: f64) -> Self {
        Self(self.0.with_floor(floor))
    }

    fn restricted(&self, lo: f64, hi: f64) -> PyResult<Self> {
        Ok(Self(self.0.restricted(Band::new(lo, hi).py()?).py()?))
    }

    fn __add__(&self, other: &Psd) -> PyResult<Self> {
        Ok(Self(self.0.add(&other.0).py()?))
    }

    /// Step servo: in-loop level `h_a` below `bandwidth`, free-running
    /// above, optionally with a servo bump.
    #[pyo3(signature = (h_a, h_b, bandwidth, bump_width=None, bump_ratio=None))]
    fn servoed(&self, h_a: f64, h_b: f64, bandwidth: f64, bump_width: Option<f64>, bump_ratio: Option<f64>) -> PyResult<Self> {
        let mut s = ServoModel::new(h_a, h_b, bandwidth).py()?;
        if let (Some(w), Some(r)) = (bump_width, bump_ratio) {
            s = s.with_bump(w, r).py()?;
        }
        Ok(Self(psd::apply_servo(&self.0, &s).py()?))
    }

    /// Beatnote noise of two lasers locked to each other with the same servo.
    #[staticmethod]
    fn phase_lock_pair(a: &Psd, b: &Psd, h_a: f64, h_b: f64, bandwidth: f64) -> PyResult<Self> {
        let s = ServoModel::new(h_a, h_b, bandwidth).py()?;
        Ok(Self(psd::phase_lock_pair(&a.0, &b.0, &s).py()?))
    }

    fn to_phase(&self) -> PyResult<Self> {
        Ok(Self(psd::freq_to_phase_psd(&self.0).py()?))
    }

    fn to_frequency(&self) -> PyResult<Self> {
        Ok(Self(psd::phase_to_freq_psd(&self.0).py()?))
    }

    /// Phase noise of the m-th comb harmonic.
    fn harmonic(&self, m: u32) -> PyResult<Self> {
        Ok(Self(comb::scale_harmonic(&self.0, m).py()?))
    }

    /// FWHM linewidth in Hz from the part above a β-separation line.
    #[pyo3(signature = (line="pi_omega"))]
    fn linewidth(&self, line: &str) -> PyResult<f64> {
        psd::linewidth_fwhm(&self.0, beta_line(line)?).py()
    }

    fn __repr__(&self) -> String {
        let b = self.0.band();
        format!("Psd(band=[{:e}, {:e}] rad/s, floor={:e})", b.lo, b.hi, self.0.floor())
    }
}

impl Psd {
    fn from_table(t: Table, lo: Option<f64>, hi: Option<f64>, floor: f64) -> PyResult<Self> {
        let (first, last) = (t.omega()[0], *t.omega().last().expect("non-empty table"));
        let b = Band::new(lo.unwrap_or(first), hi.unwrap_or(last)).py()?;
        Ok(Self(PiecewisePsd::tabulated(t, b, floor)))
    }
}

/// Piecewise-constant control sequence.
#[pyclass(frozen, skip_from_py_object, name = "Sequence", module = "laserchi")]
#[derive(Clone)]
struct Sequence(PulseSequence);

#[pymethods]
impl Sequence {
    /// Segments as `(rabi_rad_s, phase_rad, duration_s)` tuples.
    #[new]
    fn new(segments: Vec<(f64, f64, f64)>) -> PyResult<Self> {
        let segs = segments
            .into_iter()
            .map(|(rabi, phase, duration)| PulseSegment { rabi, phase, duration })
            .collect();
        Ok(Self(PulseSequence::new(segs).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (theta, rabi, phase=0.0))]
    fn primitive(theta: f64, rabi: f64, phase: f64) -> PyResult<Self> {
        Ok(Self(PulseSequence::primitive(theta, phase, rabi).py()?))
    }

    #[staticmethod]
    fn pi_pulse(rabi: f64) -> PyResult<Self> {
        Ok(Self(PulseSequence::pi_pulse(rabi).py()?))
    }

    #[staticmethod]
    fn sk1(theta: f64, rabi: f64) -> PyResult<Self> {
        Ok(Self(filter::make_sk1(theta, rabi).py()?))
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.0.duration()
    }

    #[getter]
    fn segments(&self) -> Vec<(f64, f64, f64)> {
        self.0.segments().iter().map(|s| (s.rabi, s.phase, s.duration)).collect()
    }

    /// First-order filter function sampled at `omegas`.
    #[pyo3(signature = (omegas, channel="dephasing"))]
    fn filter(&self, omegas: Vec<f64>, channel: &str) -> PyResult<Vec<f64>> {
        let f = SequenceFilter::new(&self.0, self::channel(channel)?);
        Ok(omegas.iter().map(|&w| f.value(w)).collect())
    }

    /// χ of `psd` (a noise-field PSD, S_z or S_θ) through this sequence.
    #[pyo3(signature = (psd, channel="dephasing"))]
    fn chi(&self, psd: &Psd, channel: &str) -> PyResult<f64> {
        let f = SequenceFilter::new(&self.0, self::channel(channel)?);
        Ok(fid::chi_integral(&psd.0, &f, None, ChiOptions::default()).py()?.value)
    }

    fn __len__(&self) -> usize {
        self.0.segments().len()
    }

    fn __repr__(&self) -> String {
        format!("Sequence({} segments, duration={:e} s)", self.0.segments().len(), self.0.duration())
    }
}

#[pyfunction]
fn fidelity_from_chi(chi: f64) -> f64 {
    fid::fidelity_from_chi(chi)
}

#[pyfunction]
fn infidelity_from_chi(chi: f64) -> f64 {
    fid::infidelity_from_chi(chi)
}

#[pyfunction]
fn ff_pi_dephasing(omega: f64, rabi: f64) -> f64 {
    filter::ff_pi_dephasing_exact(omega, rabi)
}

#[pyfunction]
fn ff_pi_amplitude(omega: f64, rabi: f64) -> f64 {
    filter::ff_pi_amplitude_exact(omega, rabi)
}

/// Piecewise approximation of the π-pulse dephasing filter.
#[pyfunction]
fn ff_piecewise(omega: f64, rabi: f64) -> PyResult<f64> {
    Ok(filter::ff_piecewise(&GeneralFilter::pi_pulse(rabi).py()?, omega))
}

/// χ, fidelity and per-channel breakdown of a laser-driven π rotation.
#[pyfunction]
#[pyo3(signature = (frequency_noise, rabi, operation="primitive", rin=None, qubit="optical", stark="cw"))]
fn gate<'py>(
    py: Python<'py>,
    frequency_noise: &Psd,
    rabi: f64,
    operation: &str,
    rin: Option<&Psd>,
    qubit: &str,
    stark: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let op = self::operation(operation)?;
    let zero = PiecewisePsd::zero(frequency_noise.0.band());
    let rin_psd = rin.map(|r| &r.0).unwrap_or(&zero);
    let drive = Drive {
        rabi,
        stark: self::stark(stark)?,
    };
    let ch = assemble_channels(&frequency_noise.0, rin_psd, &self::qubit(qubit)?, &drive).py()?;
    let d = op.filter(rabi, Channel::Dephasing).py()?;
    let a = op.filter(rabi, Channel::Amplitude).py()?;
    let b = fid::chi_channels(&ch, d.as_ref(), a.as_ref(), ChiOptions::default()).py()?;
    let out = PyDict::new(py);
    out.set_item("chi_dephasing", b.chi_dephasing)?;
    out.set_item("chi_amplitude", b.chi_amplitude)?;
    out.set_item("chi_total", b.chi_total)?;
    out.set_item("fidelity", b.fidelity)?;
    out.set_item("infidelity", b.infidelity)?;
    let decades: Vec<(i32, f64)> = b.decades_dephasing.iter().map(|d| (d.decade, d.chi)).collect();
    out.set_item("decades_dephasing", decades)?;
    Ok(out)
}

/// Closed-form χ for the step servo with the piecewise filter.
#[pyfunction]
fn chi_step_servo(rabi: f64, h_a: f64, h_b: f64, bandwidth: f64) -> PyResult<f64> {
    fid::chi_analytic_servoed(&GeneralFilter::pi_pulse(rabi).py()?, h_a, h_b, bandwidth).py()
}

#[pyfunction]
fn classify_region(rabi: f64, h_a: f64, h_b: f64, bandwidth: f64) -> PyResult<String> {
    Ok(fid::classify_region(&GeneralFilter::pi_pulse(rabi).py()?, h_a, h_b, bandwidth)
        .py()?
        .to_string())
}

/// Level of the χ-separation line at ω.
#[pyfunction]
fn chi_separation_line(h_a: f64, rabi: f64, omega: f64) -> f64 {
    fid::chi_separation_line(h_a, rabi, omega)
}

/// Servo bandwidth at which a white `h_b` meets the χ-separation line.
#[pyfunction]
fn chi_separation_servo(rabi: f64, h_a: f64, h_b: f64) -> PyResult<f64> {
    fid::chi_separation_servo(&GeneralFilter::pi_pulse(rabi).py()?, h_a, h_b).py()
}

/// Largest in-loop level `h_a` keeping the infidelity below `epsilon`.
#[pyfunction]
fn ha_limit(rabi: f64, epsilon: f64) -> PyResult<f64> {
    fid::ha_limit(&GeneralFilter::pi_pulse(rabi).py()?, epsilon).py()
}

/// Spontaneous-emission infidelity floor.
#[pyfunction]
#[pyo3(signature = (rabi, qubit="optical"))]
fn se_floor(rabi: f64, qubit: &str) -> PyResult<f64> {
    fid::se_floor(&self::qubit(qubit)?, rabi).py()
}

#[pyfunction]
fn white_linewidth(h: f64) -> f64 {
    psd::white_linewidth(h)
}

/// Minimum servo bandwidth (Hz) for linewidth narrowing of a white `h_b`.
#[pyfunction]
fn min_servo_bandwidth(h_b: f64) -> PyResult<f64> {
    psd::min_servo_bandwidth_beta(h_b).py()
}

/// RMS timing jitter (s) of a comb whose m-th harmonic has Lorentzian FWHM `fwhm_hz`.
#[pyfunction]
fn timing_jitter(fwhm_hz: f64, m: u32, rep_rate_hz: f64, f_min_hz: f64) -> PyResult<f64> {
    comb::linewidth_to_timing_jitter(fwhm_hz, m, rep_rate_hz, f_min_hz).py()
}

/// Infidelity landscape over a Rabi × servo-bandwidth grid (Ω outer).
#[pyfunction]
#[pyo3(signature = (free_running, h_a, h_b, rabis, bandwidths, operation="primitive", rin=None, qubit="optical", stark="cw"))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    free_running: &Psd,
    h_a: f64,
    h_b: f64,
    rabis: Vec<f64>,
    bandwidths: Vec<f64>,
    operation: &str,
    rin: Option<&Psd>,
    qubit: &str,
    stark: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rin = match rin {
        Some(r) => Some(RinCoupling {
            rin: r.0.clone(),
            qubit: self::qubit(qubit)?,
            stark: self::stark(stark)?,
        }),
        None => None,
    };
    let scenario = LandscapeScenario {
        free_running: free_running.0.clone(),
        h_a,
        h_b,
        bump: None,
        operation: self::operation(operation)?,
        rin,
        chi: ChiOptions::default(),
    };
    let points = fid::grid_points(&rabis, &bandwidths);
    let rows = py.detach(|| fid::sweep(&scenario, &points)).py()?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("rabi", r.rabi)?;
            d.set_item("servo_bandwidth", r.servo_bandwidth)?;
            d.set_item("h_b", r.h_b)?;
            d.set_item("chi_dephasing", r.chi_dephasing)?;
            d.set_item("chi_amplitude", r.chi_amplitude)?;
            d.set_item("chi_total", r.chi_total)?;
            d.set_item("infidelity", r.infidelity)?;
            d.set_item("region", r.region.to_string())?;
            Ok(d)
        })
        .collect()
}

/// Monte Carlo ensemble fidelity next to the filter-function prediction.
/// `detuning` and `rabi_noise` are PSDs of the physical fields S_Δ and S_Ω.
#[pyfunction]
#[pyo3(signature = (sequence, dt, n, seed, detuning=None, rabi_noise=None, cells_per_decade=50))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo<'py>(
    py: Python<'py>,
    sequence: &Sequence,
    dt: f64,
    n: usize,
    seed: u64,
    detuning: Option<&Psd>,
    rabi_noise: Option<&Psd>,
    cells_per_decade: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let sc = McScenario {
        sequence: sequence.0.clone(),
        detuning: detuning.map(|p| p.0.clone()),
        rabi_noise: rabi_noise.map(|p| p.0.clone()),
        dt,
        cells_per_decade,
    };
    let (ens, ff) = py
        .detach(|| -> laserchi_core::Result<_> {
            Ok((ensemble_fidelity(&sc, n, seed)?, sc.filter_prediction(ChiOptions::default())?))
        })
        .py()?;
    let out = PyDict::new(py);
    out.set_item("fidelity_mc", ens.mean_fidelity)?;
    out.set_item("std_error", ens.std_error)?;
    out.set_item("fidelity_ff", ff.fidelity)?;
    out.set_item("chi_ff", ff.chi_total)?;
    out.set_item("n_realizations", ens.n_realizations)?;
    out.set_item("seed", ens.seed)?;
    out.set_item("rng", ens.rng)?;
    out.set_item("per_realization", ens.per_realization)?;
    Ok(out)
}

/// Built-in laser presets as dictionaries of model parameters.
#[pyfunction]
fn presets(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    LaserPreset::all()
        .into_iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("name", p.kind.to_string())?;
            for (prefix, n) in [("rin", p.rin), ("frequency", p.frequency)] {
                d.set_item(format!("{prefix}_flicker_corner"), n.flicker_corner)?;
                d.set_item(format!("{prefix}_white_level"), n.white_level)?;
                d.set_item(format!("{prefix}_relaxation_peak"), n.relaxation_peak)?;
                d.set_item(format!("{prefix}_relaxation_freq"), n.relaxation_freq)?;
            }
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn laserchi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Psd>()?;
    m.add_class::<Sequence>()?;
    m.add_function(wrap_pyfunction!(fidelity_from_chi, m)?)?;
    m.add_function(wrap_pyfunction!(infidelity_from_chi, m)?)?;
    m.add_function(wrap_pyfunction!(ff_pi_dephasing, m)?)?;
    m.add_function(wrap_pyfunction!(ff_pi_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(ff_piecewise, m)?)?;
    m.add_function(wrap_pyfunction!(gate, m)?)?;
    m.add_function(wrap_pyfunction!(chi_step_servo, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(chi_separation_line, m)?)?;
    m.add_function(wrap_pyfunction!(chi_separation_servo, m)?)?;
    m.add_function(wrap_pyfunction!(ha_limit, m)?)?;
    m.add_function(wrap_pyfunction!(se_floor, m)?)?;
    m.add_function(wrap_pyfunction!(white_linewidth, m)?)?;
    m.add_function(wrap_pyfunction!(min_servo_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(timing_jitter, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
