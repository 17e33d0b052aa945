// SPDX-License-Identifier: Apache-2.0

//! Scenario files. Every physical quantity carries its unit in the key name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub laser: Laser,
    pub servo: Servo,
    #[serde(default)]
    pub qubit: Qubit,
    #[serde(default)]
    pub drive: Option<DriveCfg>,
    #[serde(default)]
    pub operation: OperationCfg,
    pub analysis: Analysis,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Output,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Laser {
    /// `ecdl`, `dpssl` or `mlfl`; mutually exclusive with `frequency_psd`
    pub preset: Option<String>,
    pub frequency_psd: Option<TableRef>,
    pub rin_psd: Option<TableRef>,
    #[serde(default)]
    pub quantum_floor_rad2_s2_per_hz: f64,
    /// free-running white level used for region labels; defaults to the preset's
    pub h_b_rad2_s2_per_hz: Option<f64>,
    pub band_lo_rad_s: Option<f64>,
    pub band_hi_rad_s: Option<f64>,
    /// mean optical power for the shot-noise clamp of preset RIN
    pub power_w: Option<f64>,
    #[serde(default)]
    pub include_rin: bool,
}

/// Two-column CSV (frequency, PSD) with declared units.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRef {
    pub path: PathBuf,
    /// `hz` or `rad_s`
    pub frequency_unit: String,
    /// `db_per_hz` or `linear`
    pub psd_unit: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Servo {
    pub h_a_rad2_s2_per_hz: f64,
    /// single servo bandwidth for point and mc_compare analyses
    pub bandwidth_rad_s: Option<f64>,
    pub bump_width_rad_s: Option<f64>,
    pub bump_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qubit {
    /// `optical` (⁴⁰Ca⁺ defaults) or `hyperfine` (⁴³Ca⁺ defaults)
    #[serde(default = "default_qubit_kind")]
    pub kind: String,
    pub lifetime_s: Option<f64>,
    pub wavelength_m: Option<f64>,
    pub linewidth_rad_s: Option<f64>,
    pub fine_structure_rad_s: Option<f64>,
    pub detuning_rad_s: Option<f64>,
    pub mu_cw: Option<f64>,
    pub mu_fc: Option<f64>,
}

fn default_qubit_kind() -> String {
    "optical".into()
}

impl Default for Qubit {
    fn default() -> Self {
        Self {
            kind: default_qubit_kind(),
            lifetime_s: None,
            wavelength_m: None,
            linewidth_rad_s: None,
            fine_structure_rad_s: None,
            detuning_rad_s: None,
            mu_cw: None,
            mu_fc: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveCfg {
    pub rabi_rad_s: Option<f64>,
    pub power_w: Option<f64>,
    pub waist_m: Option<f64>,
    /// `cw` or `fc`
    #[serde(default = "default_stark")]
    pub stark: String,
}

fn default_stark() -> String {
    "cw".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationCfg {
    /// `primitive`, `sk1` or `custom`
    pub kind: String,
    #[serde(default)]
    pub segments: Vec<SegmentCfg>,
}

impl Default for OperationCfg {
    fn default() -> Self {
        Self {
            kind: "primitive".into(),
            segments: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentCfg {
    pub rabi_rad_s: f64,
    pub phase_rad: f64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    Point {},
    Sweep(SweepCfg),
    McCompare(McCfg),
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Point {} => "point",
            Analysis::Sweep(_) => "sweep",
            Analysis::McCompare(_) => "mc_compare",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub rabi_min_rad_s: f64,
    pub rabi_max_rad_s: f64,
    pub rabi_points: usize,
    pub servo_min_rad_s: f64,
    pub servo_max_rad_s: f64,
    pub servo_points: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McCfg {
    #[serde(default = "default_realizations")]
    pub n_realizations: usize,
    #[serde(default)]
    pub seed: u64,
    /// synthesis band; defaults to [Ω·10⁻³, 20Ω]
    pub band_lo_rad_s: Option<f64>,
    pub band_hi_rad_s: Option<f64>,
    /// time steps per period of the highest synthesised frequency
    #[serde(default = "default_steps_per_period")]
    pub steps_per_period: f64,
    #[serde(default = "default_cells")]
    pub cells_per_decade: usize,
}

fn default_realizations() -> usize {
    2000
}
fn default_steps_per_period() -> f64 {
    20.0
}
fn default_cells() -> usize {
    50
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub chi_rel_tol: f64,
    #[serde(default = "default_max_evals")]
    pub chi_max_evals: usize,
    #[serde(default = "default_knots")]
    pub knots_per_decade: usize,
}

fn default_rel_tol() -> f64 {
    1e-6
}
fn default_max_evals() -> usize {
    4_000_000
}
fn default_knots() -> usize {
    10
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            chi_rel_tol: default_rel_tol(),
            chi_max_evals: default_max_evals(),
            knots_per_decade: default_knots(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub csv: PathBuf,
    /// defaults to the CSV path with a `.json` extension
    pub metadata: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// mc_compare only: per-realisation fidelities
    pub per_realization_csv: Option<PathBuf>,
}

/// A parsed scenario plus where it came from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub path: PathBuf,
    pub sha256: String,
}

impl Loaded {
    /// Resolves a path from the config relative to the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.path.parent().unwrap_or(Path::new(".")).join(p)
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Config(format!("{}: not valid UTF-8", path.display())))?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let loaded = Loaded {
        scenario,
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    };
    check(&loaded)?;
    Ok(loaded)
}

fn key_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {msg}"))
}

fn positive(key: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(key_err(key, format!("must be positive and finite, got {x}"))),
        _ => Ok(()),
    }
}

/// Structural checks that need no numerics: exclusive choices, units,
/// referenced files.
fn check(l: &Loaded) -> Result<(), CliError> {
    let s = &l.scenario;
    match (&s.laser.preset, &s.laser.frequency_psd) {
        (Some(_), Some(_)) => return Err(key_err("laser", "give either `preset` or `frequency_psd`, not both")),
        (None, None) => return Err(key_err("laser", "one of `preset` or `frequency_psd` is required")),
        (Some(p), None) => {
            p.parse::<laserchi_core::psd::LaserKind>().map_err(|e| key_err("laser.preset", e))?;
        }
        _ => {}
    }
    for (key, t) in [("laser.frequency_psd", &s.laser.frequency_psd), ("laser.rin_psd", &s.laser.rin_psd)] {
        if let Some(t) = t {
            if !matches!(t.frequency_unit.as_str(), "hz" | "rad_s") {
                return Err(key_err(&format!("{key}.frequency_unit"), format!("`{}` is not one of hz | rad_s", t.frequency_unit)));
            }
            if !matches!(t.psd_unit.as_str(), "db_per_hz" | "linear") {
                return Err(key_err(&format!("{key}.psd_unit"), format!("`{}` is not one of db_per_hz | linear", t.psd_unit)));
            }
            let p = l.resolve(&t.path);
            if !p.is_file() {
                return Err(key_err(&format!("{key}.path"), format!("file {} does not exist", p.display())));
            }
        }
    }
    if s.laser.include_rin && s.laser.rin_psd.is_none() && s.laser.preset.is_none() {
        return Err(key_err("laser.include_rin", "needs `rin_psd` or a preset"));
    }
    positive("laser.band_lo_rad_s", s.laser.band_lo_rad_s)?;
    positive("laser.band_hi_rad_s", s.laser.band_hi_rad_s)?;
    positive("laser.power_w", s.laser.power_w)?;
    positive("servo.bandwidth_rad_s", s.servo.bandwidth_rad_s)?;
    if !(s.servo.h_a_rad2_s2_per_hz >= 0.0) {
        return Err(key_err("servo.h_a_rad2_s2_per_hz", "must be non-negative"));
    }
    if s.servo.bump_width_rad_s.is_some() != s.servo.bump_ratio.is_some() {
        return Err(key_err("servo", "`bump_width_rad_s` and `bump_ratio` go together"));
    }
    if !matches!(s.qubit.kind.as_str(), "optical" | "hyperfine") {
        return Err(key_err("qubit.kind", format!("`{}` is not one of optical | hyperfine", s.qubit.kind)));
    }
    if let Some(d) = &s.drive {
        match (d.rabi_rad_s, d.power_w, d.waist_m) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => {}
            _ => return Err(key_err("drive", "give either `rabi_rad_s` or both `power_w` and `waist_m`")),
        }
        positive("drive.rabi_rad_s", d.rabi_rad_s)?;
        positive("drive.power_w", d.power_w)?;
        positive("drive.waist_m", d.waist_m)?;
        if !matches!(d.stark.as_str(), "cw" | "fc") {
            return Err(key_err("drive.stark", format!("`{}` is not one of cw | fc", d.stark)));
        }
    }
    match s.operation.kind.as_str() {
        "primitive" | "sk1" if s.operation.segments.is_empty() => {}
        "primitive" | "sk1" => return Err(key_err("operation.segments", "only allowed with kind = \"custom\"")),
        "custom" if s.operation.segments.is_empty() => return Err(key_err("operation.segments", "custom sequences need segments")),
        "custom" => {}
        other => return Err(key_err("operation.kind", format!("`{other}` is not one of primitive | sk1 | custom"))),
    }
    match &s.analysis {
        Analysis::Point {} | Analysis::McCompare(_) => {
            if s.drive.is_none() && s.operation.kind != "custom" {
                return Err(key_err("drive", format!("required for analysis mode `{}`", s.analysis.name())));
            }
            if s.servo.bandwidth_rad_s.is_none() {
                return Err(key_err("servo.bandwidth_rad_s", format!("required for analysis mode `{}`", s.analysis.name())));
            }
        }
        Analysis::Sweep(w) => {
            if s.operation.kind == "custom" {
                return Err(key_err("operation.kind", "custom sequences have a fixed Rabi frequency and cannot be swept"));
            }
            if s.servo.bandwidth_rad_s.is_some() {
                return Err(key_err("servo.bandwidth_rad_s", "not used by sweeps; set analysis.servo_min_rad_s/servo_max_rad_s"));
            }
            for (k, v) in [
                ("analysis.rabi_min_rad_s", w.rabi_min_rad_s),
                ("analysis.rabi_max_rad_s", w.rabi_max_rad_s),
                ("analysis.servo_min_rad_s", w.servo_min_rad_s),
                ("analysis.servo_max_rad_s", w.servo_max_rad_s),
            ] {
                positive(k, Some(v))?;
            }
            if w.rabi_max_rad_s < w.rabi_min_rad_s || w.servo_max_rad_s < w.servo_min_rad_s {
                return Err(key_err("analysis", "axis maxima must not be below minima"));
            }
            if w.rabi_points == 0 || w.servo_points == 0 {
                return Err(key_err("analysis", "axes need at least one point"));
            }
        }
    }
    if let Analysis::McCompare(m) = &s.analysis {
        if m.n_realizations < 2 {
            return Err(key_err("analysis.n_realizations", "need at least 2"));
        }
        positive("analysis.band_lo_rad_s", m.band_lo_rad_s)?;
        positive("analysis.band_hi_rad_s", m.band_hi_rad_s)?;
        if !(m.steps_per_period > 2.0) {
            return Err(key_err("analysis.steps_per_period", "must exceed 2 (Nyquist)"));
        }
    } else if s.output.per_realization_csv.is_some() {
        return Err(key_err("output.per_realization_csv", "only used by mc_compare"));
    }
    Ok(())
}
