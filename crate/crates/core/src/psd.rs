// SPDX-License-Identifier: Apache-2.0

//! One-sided laser-noise power spectral densities.
//!
//! A [`PiecewisePsd`] is a tiling of a finite angular-frequency band into
//! segments, each carrying an analytic expression built from a small set of
//! shapes (white, flicker, relaxation-oscillation Lorentzian, servo bump,
//! tabulated data). Composition (scaling, sums, servo splicing, conversion
//! between frequency and phase noise) produces new expressions rather than
//! resampling, so every PSD stays exactly evaluable at any ω in its band.
//! A constant floor is applied last, by pointwise max.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{db_to_linear, HBAR, PLANCK};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions};

/// Finite angular-frequency band `[lo, hi]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi <= lo {
            return Err(Error::domain(format!("invalid band [{lo}, {hi}] rad/s")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.lo && omega <= self.hi
    }

    fn same_as(&self, other: &Band) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.lo, other.lo) && close(self.hi, other.hi)
    }
}

impl Default for Band {
    /// 0.1 Hz to 100 GHz.
    fn default() -> Self {
        Self {
            lo: 2.0 * PI * 0.1,
            hi: 2.0 * PI * 1e11,
        }
    }
}

/// Tabulated spectrum, log-log interpolated, constant beyond its ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    omega: Vec<f64>,
    value: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    Hz,
    RadS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdUnit {
    DbPerHz,
    Linear,
}

impl FromStr for FrequencyUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hz" => Ok(Self::Hz),
            "rad_s" => Ok(Self::RadS),
            other => Err(Error::Table(format!("unknown frequency unit `{other}` (hz | rad_s)"))),
        }
    }
}

impl FromStr for PsdUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db_per_hz" => Ok(Self::DbPerHz),
            "linear" => Ok(Self::Linear),
            other => Err(Error::Table(format!("unknown PSD unit `{other}` (db_per_hz | linear)"))),
        }
    }
}

impl Table {
    /// Builds a table from angular frequencies and linear PSD values.
    pub fn new(omega: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if omega.len() != value.len() || omega.len() < 2 {
            return Err(Error::Table("need at least two (frequency, PSD) rows".into()));
        }
        if omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Table("frequencies must be finite and positive".into()));
        }
        if let Some(i) = omega.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Table(format!(
                "frequencies must be strictly ascending (row {} is not above row {})",
                i + 2,
                i + 1
            )));
        }
        if value.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Table("PSD values must be finite and positive".into()));
        }
        Ok(Self { omega, value })
    }

    /// Reads two-column CSV; a single non-numeric header row is accepted.
    pub fn from_csv_reader<R: Read>(reader: R, frequency: FrequencyUnit, psd: PsdUnit) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut omega = Vec::new();
        let mut value = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Table(format!("row {}: expected 2 columns, found {}", i + 1, record.len())));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            let (f, s) = match parsed {
                (Ok(f), Ok(s)) => (f, s),
                _ if i == 0 => continue,
                _ => return Err(Error::Table(format!("row {}: non-numeric entry", i + 1))),
            };
            omega.push(match frequency {
                FrequencyUnit::Hz => 2.0 * PI * f,
                FrequencyUnit::RadS => f,
            });
            value.push(match psd {
                PsdUnit::DbPerHz => db_to_linear(s),
                PsdUnit::Linear => s,
            });
        }
        Self::new(omega, value)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, frequency: FrequencyUnit, psd: PsdUnit) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, frequency, psd)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn value(&self) -> &[f64] {
        &self.value
    }

    fn eval(&self, omega: f64) -> f64 {
        let n = self.omega.len();
        if omega <= self.omega[0] {
            return self.value[0];
        }
        if omega >= self.omega[n - 1] {
            return self.value[n - 1];
        }
        let i = self.omega.partition_point(|&w| w <= omega) - 1;
        let (x0, x1) = (self.omega[i].ln(), self.omega[i + 1].ln());
        let (y0, y1) = (self.value[i].ln(), self.value[i + 1].ln());
        let t = (omega.ln() - x0) / (x1 - x0);
        (y0 + t * (y1 - y0)).exp()
    }
}

/// Elementary spectral shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    White { level: f64 },
    /// `level · corner / ω`
    Flicker { level: f64, corner: f64 },
    /// `continuity · level / ((1 − (ω/resonance)²)² + 1/peak_ratio)`
    Relaxation {
        level: f64,
        peak_ratio: f64,
        resonance: f64,
        continuity: f64,
    },
    /// Lorentzian of half-width `width` and peak `height`, shifted and
    /// rescaled so it falls to exactly zero at `center ± 3·width`.
    Bump { height: f64, center: f64, width: f64 },
    Table(Arc<Table>),
}

/// Truncation of the servo bump, in bump widths.
pub const BUMP_SUPPORT_WIDTHS: f64 = 3.0;

impl Shape {
    fn eval(&self, omega: f64) -> f64 {
        match self {
            Shape::White { level } => *level,
            Shape::Flicker { level, corner } => level * corner / omega,
            Shape::Relaxation {
                level,
                peak_ratio,
                resonance,
                continuity,
            } => {
                let x = omega / resonance;
                let d = 1.0 - x * x;
                continuity * level / (d * d + 1.0 / peak_ratio)
            }
            Shape::Bump { height, center, width } => {
                let x = (omega - center) / width;
                if x.abs() >= BUMP_SUPPORT_WIDTHS {
                    return 0.0;
                }
                let edge = 1.0 / (1.0 + BUMP_SUPPORT_WIDTHS * BUMP_SUPPORT_WIDTHS);
                height * (1.0 / (1.0 + x * x) - edge) / (1.0 - edge)
            }
            Shape::Table(t) => t.eval(omega),
        }
    }

    fn features(&self, out: &mut Vec<f64>) {
        match self {
            Shape::White { .. } => {}
            Shape::Flicker { corner, .. } => out.push(*corner),
            Shape::Relaxation { resonance, .. } => out.push(*resonance),
            Shape::Bump { center, width, .. } => {
                out.extend([
                    center - BUMP_SUPPORT_WIDTHS * width,
                    center - width,
                    *center,
                    center + width,
                    center + BUMP_SUPPORT_WIDTHS * width,
                ]);
            }
            Shape::Table(t) => out.extend_from_slice(&t.omega),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Shape(Shape),
    Scale(f64, Arc<Expr>),
    OmegaPower(i32, Arc<Expr>),
    Sum(Vec<Arc<Expr>>),
    /// pointwise max with a constant
    Floor(Arc<Expr>, f64),
}

impl Expr {
    fn eval(&self, omega: f64) -> f64 {
        match self {
            Expr::Shape(s) => s.eval(omega),
            Expr::Scale(k, e) => k * e.eval(omega),
            Expr::OmegaPower(p, e) => omega.powi(*p) * e.eval(omega),
            Expr::Sum(terms) => terms.iter().map(|t| t.eval(omega)).sum(),
            Expr::Floor(e, f) => e.eval(omega).max(*f),
        }
    }

    fn features(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Shape(s) => s.features(out),
            Expr::Scale(_, e) | Expr::OmegaPower(_, e) | Expr::Floor(e, _) => e.features(out),
            Expr::Sum(terms) => terms.iter().for_each(|t| t.features(out)),
        }
    }

    fn shape(s: Shape) -> Arc<Expr> {
        Arc::new(Expr::Shape(s))
    }

    fn floored(e: &Arc<Expr>, floor: f64) -> Arc<Expr> {
        if floor > 0.0 {
            Arc::new(Expr::Floor(e.clone(), floor))
        } else {
            e.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    lo: f64,
    hi: f64,
    expr: Arc<Expr>,
}

/// A one-sided PSD over a finite band: contiguous analytic segments plus a
/// constant floor. Immutable; cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePsd {
    segments: Arc<[Segment]>,
    floor: f64,
}

impl PiecewisePsd {
    fn from_parts(segments: Vec<Segment>, floor: f64) -> Self {
        debug_assert!(!segments.is_empty());
        debug_assert!(segments.windows(2).all(|w| w[0].hi == w[1].lo));
        Self {
            segments: segments.into(),
            floor,
        }
    }

    fn single(band: Band, expr: Arc<Expr>, floor: f64) -> Self {
        Self::from_parts(
            vec![Segment {
                lo: band.lo,
                hi: band.hi,
                expr,
            }],
            floor,
        )
    }

    /// Constant PSD over `band`.
    pub fn white(level: f64, band: Band) -> Result<Self> {
        if !(level.is_finite() && level >= 0.0) {
            return Err(Error::domain(format!("white level must be non-negative, got {level}")));
        }
        Ok(Self::single(band, Expr::shape(Shape::White { level }), 0.0))
    }

    /// Identically zero PSD over `band`.
    pub fn zero(band: Band) -> Self {
        Self::single(band, Expr::shape(Shape::White { level: 0.0 }), 0.0)
    }

    /// Pure flicker `level·corner/ω` over the whole band.
    pub fn flicker(level: f64, corner: f64, band: Band) -> Result<Self> {
        if band.lo <= 0.0 {
            return Err(Error::domain("flicker noise needs a band starting above ω = 0"));
        }
        if !(level >= 0.0 && corner > 0.0) {
            return Err(Error::domain("flicker level must be ≥ 0 and corner > 0"));
        }
        Ok(Self::single(band, Expr::shape(Shape::Flicker { level, corner }), 0.0))
    }

    /// Tabulated spectrum over `band`, constant beyond the table ends.
    pub fn tabulated(table: Table, band: Band, floor: f64) -> Self {
        Self::single(band, Expr::shape(Shape::Table(Arc::new(table))), floor.max(0.0))
    }

    pub fn band(&self) -> Band {
        Band {
            lo: self.segments[0].lo,
            hi: self.segments[self.segments.len() - 1].hi,
        }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Evaluates the PSD. Outside the band the edge segments' analytic
    /// forms are extrapolated; use [`Self::try_value`] to reject instead.
    pub fn value(&self, omega: f64) -> f64 {
        let idx = self
            .segments
            .partition_point(|s| s.hi <= omega)
            .min(self.segments.len() - 1);
        self.segments[idx].expr.eval(omega).max(self.floor)
    }

    pub fn try_value(&self, omega: f64) -> Result<f64> {
        if !self.band().contains(omega) {
            let b = self.band();
            return Err(Error::domain(format!("ω = {omega} outside band [{}, {}]", b.lo, b.hi)));
        }
        Ok(self.value(omega))
    }

    /// Values immediately left and right of ω (for continuity checks at
    /// segment edges).
    pub fn one_sided_values(&self, omega: f64) -> (f64, f64) {
        let left = self
            .segments
            .iter()
            .rev()
            .find(|s| s.lo < omega)
            .unwrap_or(&self.segments[0]);
        let right = self
            .segments
            .iter()
            .find(|s| s.hi > omega)
            .unwrap_or(&self.segments[self.segments.len() - 1]);
        (
            left.expr.eval(omega).max(self.floor),
            right.expr.eval(omega).max(self.floor),
        )
    }

    /// Interior segment boundaries.
    pub fn segment_edges(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.lo).collect()
    }

    /// Every frequency where the PSD has a kink, step or resonance inside
    /// its band, ascending. Used to place quadrature knots.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = self.segment_edges();
        for s in self.segments.iter() {
            s.expr.features(&mut pts);
        }
        let band = self.band();
        let mut pts: Vec<f64> = pts.into_iter().filter(|p| *p > band.lo && *p < band.hi).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Multiplies the PSD (and its floor) by a non-negative constant.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::domain(format!("PSD scale factor must be ≥ 0, got {k}")));
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                expr: Arc::new(Expr::Scale(k, s.expr.clone())),
                ..s.clone()
            })
            .collect();
        Ok(Self::from_parts(segments, self.floor * k))
    }

    /// Pointwise multiplication by ω^p. The floor is folded into the
    /// segment expressions first, so it is carried through exactly.
    pub fn times_omega_power(&self, p: i32) -> Result<Self> {
        if p < 0 && self.band().lo <= 0.0 {
            return Err(Error::domain("division by ω requires a band excluding ω = 0"));
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                expr: Arc::new(Expr::OmegaPower(p, Expr::floored(&s.expr, self.floor))),
                ..s.clone()
            })
            .collect();
        Ok(Self::from_parts(segments, 0.0))
    }

    /// Raises the floor to at least `floor`.
    pub fn with_floor(&self, floor: f64) -> Self {
        Self {
            segments: self.segments.clone(),
            floor: self.floor.max(floor),
        }
    }

    fn split_edges(&self, other: &PiecewisePsd) -> Vec<f64> {
        let mut e = self.segment_edges();
        e.extend(other.segment_edges());
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    fn expr_at(&self, lo: f64, hi: f64) -> &Arc<Expr> {
        let mid = 0.5 * (lo + hi);
        let idx = self
            .segments
            .partition_point(|s| s.hi <= mid)
            .min(self.segments.len() - 1);
        &self.segments[idx].expr
    }

    /// Pointwise sum. Both PSDs must share the same band.
    pub fn add(&self, other: &PiecewisePsd) -> Result<Self> {
        let band = self.band();
        if !band.same_as(&other.band()) {
            return Err(Error::domain("cannot add PSDs with different bands"));
        }
        let mut edges = vec![band.lo];
        edges.extend(self.split_edges(other));
        edges.push(band.hi);
        let segments = edges
            .windows(2)
            .map(|w| Segment {
                lo: w[0],
                hi: w[1],
                expr: Arc::new(Expr::Sum(vec![
                    Expr::floored(self.expr_at(w[0], w[1]), self.floor),
                    Expr::floored(other.expr_at(w[0], w[1]), other.floor),
                ])),
            })
            .collect();
        // max(a, fa) + max(b, fb) ≥ fa + fb, so the combined floor is exact
        Ok(Self::from_parts(segments, self.floor + other.floor))
    }

    /// Segments of `self` restricted to `[lo, hi]`, expressions floored.
    fn clipped_segments(&self, lo: f64, hi: f64, floor_into_expr: bool) -> Vec<Segment> {
        self.segments
            .iter()
            .filter(|s| s.hi > lo && s.lo < hi)
            .map(|s| Segment {
                lo: s.lo.max(lo),
                hi: s.hi.min(hi),
                expr: if floor_into_expr {
                    Expr::floored(&s.expr, self.floor)
                } else {
                    s.expr.clone()
                },
            })
            .collect()
    }

    /// `below` on `[lo, at)`, `above` on `[at, hi]`. Bands must match and
    /// `at` must be strictly inside.
    pub fn splice(below: &PiecewisePsd, above: &PiecewisePsd, at: f64) -> Result<Self> {
        let band = below.band();
        if !band.same_as(&above.band()) {
            return Err(Error::domain("spliced PSDs must share a band"));
        }
        if !(at > band.lo && at < band.hi) {
            return Err(Error::domain(format!(
                "splice point {at} outside band interior ({}, {})",
                band.lo, band.hi
            )));
        }
        let same_floor = below.floor == above.floor;
        let mut segments = below.clipped_segments(band.lo, at, !same_floor);
        segments.extend(above.clipped_segments(at, band.hi, !same_floor));
        let floor = if same_floor { below.floor } else { below.floor.min(above.floor) };
        Ok(Self::from_parts(segments, floor))
    }

    /// Adds `shape` on `[lo, hi]` only (the shape must vanish at both ends
    /// to keep the PSD continuous there).
    fn with_local_term(&self, shape: Shape, lo: f64, hi: f64) -> Self {
        let band = self.band();
        let (lo, hi) = (lo.max(band.lo), hi.min(band.hi));
        let mut cuts: Vec<f64> = self.segment_edges();
        cuts.extend([lo, hi].into_iter().filter(|c| *c > band.lo && *c < band.hi));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut edges = vec![band.lo];
        edges.extend(cuts);
        edges.push(band.hi);
        let term = Expr::shape(shape);
        let segments = edges
            .windows(2)
            .map(|w| {
                let base = self.expr_at(w[0], w[1]).clone();
                let expr = if w[0] >= lo && w[1] <= hi {
                    Arc::new(Expr::Sum(vec![base, term.clone()]))
                } else {
                    base
                };
                Segment {
                    lo: w[0],
                    hi: w[1],
                    expr,
                }
            })
            .collect();
        Self::from_parts(segments, self.floor)
    }

    /// The same PSD on the sub-band `band`, which must lie inside the
    /// current band.
    pub fn restricted(&self, band: Band) -> Result<Self> {
        let own = self.band();
        if !(band.lo >= own.lo && band.hi <= own.hi) {
            return Err(Error::domain(format!(
                "sub-band ({}, {}) not inside PSD band ({}, {})",
                band.lo, band.hi, own.lo, own.hi
            )));
        }
        Ok(Self::from_parts(self.clipped_segments(band.lo, band.hi, false), self.floor))
    }

    /// Samples the PSD on a grid.
    pub fn sample(&self, omegas: &[f64]) -> Vec<f64> {
        omegas.iter().map(|&w| self.value(w)).collect()
    }

    /// `∫ S dω` over `[lo, hi]` (clipped to the band).
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        let band = self.band();
        let (lo, hi) = (lo.max(band.lo), hi.min(band.hi));
        if hi <= lo {
            return Ok(0.0);
        }
        let mut pts = self.breakpoints();
        if lo > 0.0 {
            pts.extend(quadrature::log_grid(lo, hi, 4));
        }
        let knots = quadrature::merge_knots(pts, lo, hi);
        let r = quadrature::integrate(|w| self.value(w), &knots, QuadOptions {
            rel_tol: 1e-10,
            ..Default::default()
        })
        .map_err(|e| match e {
            Error::Numerical { detail, .. } => Error::numerical(format!("PSD integral over [{lo:e}, {hi:e}] rad/s"), detail),
            other => other,
        })?;
        if !r.value.is_finite() {
            return Err(Error::numerical(
                format!("PSD integral over [{lo:e}, {hi:e}] rad/s"),
                format!("evaluated to {}", r.value),
            ));
        }
        Ok(r.value)
    }
}

/// Shape parameters shared by the intensity and frequency noise models:
/// flicker below `flicker_corner`, white level, relaxation-oscillation peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// ω_f, rad/s
    pub flicker_corner: f64,
    /// A_w: linear PSD units (1/Hz for RIN, (rad/s)²/Hz for frequency noise)
    pub white_level: f64,
    /// A_r: linear ratio of the relaxation peak above the white level
    pub relaxation_peak: f64,
    /// ω_r, rad/s
    pub relaxation_freq: f64,
}

pub type RinParams = NoiseParams;
pub type FreqParams = NoiseParams;

impl NoiseParams {
    fn validate(&self) -> Result<()> {
        let p = self;
        if !(p.flicker_corner > 0.0 && p.relaxation_freq > 0.0) {
            return Err(Error::domain("flicker corner and relaxation frequency must be positive"));
        }
        if p.flicker_corner >= p.relaxation_freq {
            return Err(Error::domain(format!(
                "flicker corner ({}) must lie below the relaxation frequency ({})",
                p.flicker_corner, p.relaxation_freq
            )));
        }
        if !(p.white_level >= 0.0 && p.white_level.is_finite()) {
            return Err(Error::domain("white level must be finite and non-negative"));
        }
        if !(p.relaxation_peak > 0.0 && p.relaxation_peak.is_finite()) {
            return Err(Error::domain("relaxation peak ratio must be positive"));
        }
        Ok(())
    }

    /// Continuity constant C joining the flicker and relaxation branches.
    pub fn continuity(&self) -> f64 {
        let x = self.flicker_corner / self.relaxation_freq;
        let d = 1.0 - x * x;
        d * d + 1.0 / self.relaxation_peak
    }
}

fn laser_model(p: &NoiseParams, floor: f64, band: Band) -> Result<PiecewisePsd> {
    p.validate()?;
    if band.lo <= 0.0 {
        return Err(Error::domain("laser noise models need a band starting above ω = 0"));
    }
    let flicker = Expr::shape(Shape::Flicker {
        level: p.white_level,
        corner: p.flicker_corner,
    });
    let relax = Expr::shape(Shape::Relaxation {
        level: p.white_level,
        peak_ratio: p.relaxation_peak,
        resonance: p.relaxation_freq,
        continuity: p.continuity(),
    });
    let wf = p.flicker_corner;
    let segments = if wf <= band.lo {
        vec![Segment { lo: band.lo, hi: band.hi, expr: relax }]
    } else if wf >= band.hi {
        vec![Segment { lo: band.lo, hi: band.hi, expr: flicker }]
    } else {
        vec![
            Segment { lo: band.lo, hi: wf, expr: flicker },
            Segment { lo: wf, hi: band.hi, expr: relax },
        ]
    };
    Ok(PiecewisePsd::from_parts(segments, floor))
}

/// Shot-noise limit of RIN, `2ħω_opt / P̄` (1/Hz).
pub fn shot_noise_limit(mean_power: f64, optical_freq: f64) -> Result<f64> {
    if !(mean_power > 0.0 && optical_freq > 0.0) {
        return Err(Error::domain("shot-noise limit needs positive power and optical frequency"));
    }
    Ok(2.0 * HBAR * optical_freq / mean_power)
}

/// Quantum (modified Schawlow–Townes) floor of frequency noise,
/// `2π h ω_opt γ_c² / P̄`.
pub fn quantum_noise_limit(mean_power: f64, optical_freq: f64, cavity_bandwidth: f64) -> Result<f64> {
    if !(mean_power > 0.0 && optical_freq > 0.0 && cavity_bandwidth >= 0.0) {
        return Err(Error::domain("quantum noise limit needs positive power and frequency"));
    }
    Ok(2.0 * PI * PLANCK * optical_freq * cavity_bandwidth * cavity_bandwidth / mean_power)
}

/// Relative intensity noise of a free-running laser, clamped at the shot-noise limit.
pub fn rin_model(params: &RinParams, mean_power: f64, optical_freq: f64, band: Band) -> Result<PiecewisePsd> {
    let snl = shot_noise_limit(mean_power, optical_freq)?;
    laser_model(params, snl, band)
}

/// Free-running laser frequency noise, clamped at `quantum_floor`.
pub fn freq_noise_model(params: &FreqParams, quantum_floor: f64, band: Band) -> Result<PiecewisePsd> {
    if !(quantum_floor >= 0.0 && quantum_floor.is_finite()) {
        return Err(Error::domain("quantum floor must be finite and non-negative"));
    }
    laser_model(params, quantum_floor, band)
}

/// Lorentzian peak placed at the servo bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoBump {
    /// half-width at half-maximum, rad/s
    pub width: f64,
    /// peak level relative to the free-running white level h_b (≥ 1)
    pub ratio: f64,
}

/// Stabilised-laser model: in-loop white level `h_a` up to `bandwidth`,
/// free-running noise (white level `h_b`) above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoModel {
    pub h_a: f64,
    pub h_b: f64,
    /// ω_srv, rad/s
    pub bandwidth: f64,
    /// optional in-loop flicker corner ω_f^(s)
    #[serde(default)]
    pub in_loop_flicker_corner: Option<f64>,
    #[serde(default)]
    pub bump: Option<ServoBump>,
}

impl ServoModel {
    pub fn new(h_a: f64, h_b: f64, bandwidth: f64) -> Result<Self> {
        let s = Self {
            h_a,
            h_b,
            bandwidth,
            in_loop_flicker_corner: None,
            bump: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_bump(mut self, width: f64, ratio: f64) -> Result<Self> {
        self.bump = Some(ServoBump { width, ratio });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::domain("servo bandwidth must be positive and finite"));
        }
        if !(self.h_a >= 0.0 && self.h_b >= 0.0) {
            return Err(Error::domain("servo noise levels h_a, h_b must be non-negative"));
        }
        if let Some(c) = self.in_loop_flicker_corner {
            if !(c > 0.0 && c < self.bandwidth) {
                return Err(Error::domain("in-loop flicker corner must lie in (0, ω_srv)"));
            }
        }
        if let Some(b) = self.bump {
            if !(b.ratio >= 1.0 && b.width > 0.0) {
                return Err(Error::domain("servo bump needs width > 0 and amplitude ratio ≥ 1"));
            }
        }
        Ok(())
    }

    /// The two-level step PSD (h_a below ω_srv, h_b above) on `band`.
    pub fn step_psd(&self, band: Band) -> Result<PiecewisePsd> {
        let fr = PiecewisePsd::white(self.h_b, band)?;
        apply_servo(&fr, self)
    }
}

/// Replaces the free-running PSD below the servo bandwidth by the in-loop
/// level, optionally adding a bump at ω_srv. The step at ω_srv is kept
/// discontinuous.
pub fn apply_servo(free_running: &PiecewisePsd, servo: &ServoModel) -> Result<PiecewisePsd> {
    servo.validate()?;
    let band = free_running.band();
    if !(servo.bandwidth > band.lo && servo.bandwidth < band.hi) {
        return Err(Error::domain(format!(
            "servo bandwidth {} outside PSD band ({}, {})",
            servo.bandwidth, band.lo, band.hi
        )));
    }
    let mut in_loop = vec![];
    let white = Expr::shape(Shape::White { level: servo.h_a });
    match servo.in_loop_flicker_corner {
        Some(c) if c > band.lo => {
            in_loop.push(Segment {
                lo: band.lo,
                hi: c,
                expr: Expr::shape(Shape::Flicker {
                    level: servo.h_a,
                    corner: c,
                }),
            });
            in_loop.push(Segment {
                lo: c,
                hi: servo.bandwidth,
                expr: white,
            });
        }
        _ => in_loop.push(Segment {
            lo: band.lo,
            hi: servo.bandwidth,
            expr: white,
        }),
    }
    let below = PiecewisePsd::from_parts(
        {
            let mut v = in_loop;
            v.push(Segment {
                lo: servo.bandwidth,
                hi: band.hi,
                expr: Expr::shape(Shape::White { level: 0.0 }),
            });
            v
        },
        free_running.floor,
    );
    let spliced = PiecewisePsd::splice(&below, free_running, servo.bandwidth)?;
    Ok(match servo.bump {
        Some(b) if b.ratio > 1.0 && servo.h_b > 0.0 => {
            let half = BUMP_SUPPORT_WIDTHS * b.width;
            spliced.with_local_term(
                Shape::Bump {
                    height: (b.ratio - 1.0) * servo.h_b,
                    center: servo.bandwidth,
                    width: b.width,
                },
                servo.bandwidth - half,
                servo.bandwidth + half,
            )
        }
        _ => spliced,
    })
}

/// Offset phase lock of two lasers: servo branch below ω_srv, mean of the
/// two free-running PSDs above.
pub fn phase_lock_pair(fr1: &PiecewisePsd, fr2: &PiecewisePsd, servo: &ServoModel) -> Result<PiecewisePsd> {
    if !fr1.band().same_as(&fr2.band()) {
        return Err(Error::domain("phase-locked lasers must share a PSD band"));
    }
    let mean = fr1.add(fr2)?.scaled(0.5)?;
    apply_servo(&mean, servo)
}

/// `S_φ(ω) = S_δω(ω) / ω²`
pub fn freq_to_phase_psd(freq: &PiecewisePsd) -> Result<PiecewisePsd> {
    freq.times_omega_power(-2)
}

/// `S_δω(ω) = ω² S_φ(ω)`
pub fn phase_to_freq_psd(phase: &PiecewisePsd) -> Result<PiecewisePsd> {
    if phase.band().lo <= 0.0 {
        return Err(Error::domain("phase-noise PSD band must exclude ω = 0"));
    }
    phase.times_omega_power(2)
}

/// Which form of the β-separation line to use, `S_δω(ω) > slope · ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaLine {
    /// `S > π ω`
    #[default]
    PiOmega,
    /// `S > 16 ln2 ω / π`, the exact angular-unit image of the
    /// `8 ln2 f / π²` (Hz²/Hz) line.
    DiDomenico,
}

impl BetaLine {
    pub fn slope(self) -> f64 {
        match self {
            BetaLine::PiOmega => PI,
            BetaLine::DiDomenico => 16.0 * LN_2 / PI,
        }
    }

    pub fn threshold(self, omega: f64) -> f64 {
        self.slope() * omega
    }

    /// Frequency where a white level `h` meets the line.
    pub fn white_crossing(self, h: f64) -> f64 {
        h / self.slope()
    }
}

impl fmt::Display for BetaLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaLine::PiOmega => write!(f, "pi_omega"),
            BetaLine::DiDomenico => write!(f, "di_domenico"),
        }
    }
}

impl FromStr for BetaLine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi_omega" => Ok(Self::PiOmega),
            "di_domenico" => Ok(Self::DiDomenico),
            other => Err(Error::domain(format!("unknown β-line convention `{other}`"))),
        }
    }
}

/// FWHM (Hz) of a Lorentzian line from a white frequency-noise level
/// `h` in (rad/s)²/Hz: `h / 4π`.
pub fn white_linewidth(h: f64) -> f64 {
    h / (4.0 * PI)
}

/// Intervals of the band where `S(ω) > line(ω)`.
pub fn above_beta_intervals(psd: &PiecewisePsd, line: BetaLine) -> Vec<(f64, f64)> {
    let band = psd.band();
    let excess = |w: f64| psd.value(w) - line.threshold(w);
    let lo = band.lo.max(band.hi * 1e-30);
    let mut grid = quadrature::log_grid(lo, band.hi, 400);
    grid.extend(psd.breakpoints());
    let grid = quadrature::merge_knots(grid, lo, band.hi);

    let mut intervals = vec![];
    let mut start: Option<f64> = None;
    let refine = |mut a: f64, mut b: f64| {
        // a and b bracket a sign change of `excess`
        let sa = excess(a) > 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (excess(m) > 0.0) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    if excess(grid[0]) > 0.0 {
        start = Some(grid[0]);
    }
    for w in grid.windows(2) {
        let (ea, eb) = (excess(w[0]) > 0.0, excess(w[1]) > 0.0);
        if ea != eb {
            let x = refine(w[0], w[1]);
            if eb {
                start = Some(x);
            } else if let Some(s) = start.take() {
                intervals.push((s, x));
            }
        }
    }
    if let Some(s) = start {
        intervals.push((s, band.hi));
    }
    intervals
}

/// Linewidth (FWHM, Hz) estimated from the part of a frequency-noise PSD
/// lying above the β-separation line: `A = (1/2π)∫ S dω` over that region,
/// `FWHM = √(8 ln2 · A) / 2π`. Falls back to the white linewidth of the
/// lowest-frequency level when no part of the PSD is above the line.
pub fn linewidth_fwhm(psd: &PiecewisePsd, line: BetaLine) -> Result<f64> {
    let intervals = above_beta_intervals(psd, line);
    if intervals.is_empty() {
        return Ok(white_linewidth(psd.value(psd.band().lo)));
    }
    let mut area = 0.0;
    for (a, b) in intervals {
        area += psd.integrate(a, b)?;
    }
    let a_rad = area / (2.0 * PI);
    Ok((8.0 * LN_2 * a_rad).sqrt() / (2.0 * PI))
}

/// Minimum servo bandwidth for linewidth narrowing, `h_b / (32 ln 2)`.
///
/// With `h_b` in (rad/s)²/Hz this is the crossing of the white level with
/// the [`BetaLine::DiDomenico`] line expressed as an ordinary frequency
/// (Hz); multiply by 2π for the angular crossing.
pub fn min_servo_bandwidth_beta(h_b: f64) -> Result<f64> {
    if !(h_b >= 0.0 && h_b.is_finite()) {
        return Err(Error::domain("h_b must be finite and non-negative"));
    }
    Ok(h_b / (32.0 * LN_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaserKind {
    /// external-cavity diode laser
    Ecdl,
    /// diode-pumped solid-state laser
    Dpssl,
    /// mode-locked fibre laser
    Mlfl,
}

impl LaserKind {
    pub const ALL: [LaserKind; 3] = [LaserKind::Ecdl, LaserKind::Dpssl, LaserKind::Mlfl];
}

impl FromStr for LaserKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ECDL" | "DL" => Ok(Self::Ecdl),
            "DPSSL" | "DPSS" | "SSL" => Ok(Self::Dpssl),
            "MLFL" => Ok(Self::Mlfl),
            other => Err(Error::domain(format!("unknown laser preset `{other}` (ECDL | DPSSL | MLFL)"))),
        }
    }
}

impl fmt::Display for LaserKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LaserKind::Ecdl => "ECDL",
            LaserKind::Dpssl => "DPSSL",
            LaserKind::Mlfl => "MLFL",
        })
    }
}

/// Representative free-running noise parameters for a laser technology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPreset {
    pub kind: LaserKind,
    pub rin: RinParams,
    pub frequency: FreqParams,
}

/// Converts a frequency-noise level quoted in dB re 1 Hz²/Hz to (rad/s)²/Hz.
pub fn freq_level_from_db_hz2(db: f64) -> f64 {
    4.0 * PI * PI * db_to_linear(db)
}

impl LaserPreset {
    /// Typical parameters. RIN white levels are in dB/Hz; the diode laser
    /// RIN sits at the shot-noise limit and is modelled with a zero
    /// technical level. Frequency-noise levels are read as dB re 1 Hz²/Hz.
    pub fn get(kind: LaserKind) -> Self {
        let two_pi = 2.0 * PI;
        match kind {
            LaserKind::Ecdl => Self {
                kind,
                rin: NoiseParams {
                    flicker_corner: two_pi * 1e4,
                    white_level: 0.0,
                    relaxation_peak: db_to_linear(20.0),
                    relaxation_freq: two_pi * 1e9,
                },
                frequency: NoiseParams {
                    flicker_corner: two_pi * 1e4,
                    white_level: freq_level_from_db_hz2(20.0),
                    relaxation_peak: db_to_linear(20.0),
                    relaxation_freq: two_pi * 1e9,
                },
            },
            LaserKind::Dpssl => Self {
                kind,
                rin: NoiseParams {
                    flicker_corner: two_pi * 1e4,
                    white_level: db_to_linear(-110.0),
                    relaxation_peak: db_to_linear(20.0),
                    relaxation_freq: two_pi * 1e5,
                },
                frequency: NoiseParams {
                    flicker_corner: two_pi * 1e4,
                    white_level: freq_level_from_db_hz2(-20.0),
                    relaxation_peak: db_to_linear(20.0),
                    relaxation_freq: two_pi * 1e5,
                },
            },
            LaserKind::Mlfl => Self {
                kind,
                rin: NoiseParams {
                    flicker_corner: two_pi * 5e2,
                    white_level: db_to_linear(-130.0),
                    relaxation_peak: db_to_linear(5.0),
                    relaxation_freq: two_pi * 1e4,
                },
                frequency: NoiseParams {
                    flicker_corner: two_pi * 5e2,
                    white_level: freq_level_from_db_hz2(20.0),
                    relaxation_peak: db_to_linear(5.0),
                    relaxation_freq: two_pi * 1e4,
                },
            },
        }
    }

    pub fn all() -> Vec<Self> {
        LaserKind::ALL.iter().map(|k| Self::get(*k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{linear_to_db, optical_angular_frequency};

    fn band() -> Band {
        Band::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn rin_tail_is_shot_noise_limited() {
        let p = LaserPreset::get(LaserKind::Dpssl).rin;
        let w = optical_angular_frequency(729e-9);
        let psd = rin_model(&p, 1e-3, w, band()).unwrap();
        let snl = 2.0 * HBAR * w / 1e-3;
        assert_eq!(psd.value(band().hi), snl);
        assert_eq!(psd.floor(), snl);
    }

    #[test]
    fn rin_continuous_at_flicker_corner() {
        let p = LaserPreset::get(LaserKind::Dpssl).rin;
        let psd = rin_model(&p, 10.0, optical_angular_frequency(1064e-9), band()).unwrap();
        let (l, r) = psd.one_sided_values(p.flicker_corner);
        assert!(rel(l, r) < 1e-12, "{l} vs {r}");
        assert!(rel(l, p.white_level) < 1e-12);
    }

    #[test]
    fn dpss_relaxation_peak_value() {
        let p = LaserPreset::get(LaserKind::Dpssl).rin;
        let psd = rin_model(&p, 10.0, optical_angular_frequency(1064e-9), band()).unwrap();
        let expected = p.white_level * p.relaxation_peak * p.continuity();
        assert!(rel(psd.value(p.relaxation_freq), expected) < 0.01);
        // dense max search over a decade around the resonance
        let grid = quadrature::log_grid(p.relaxation_freq / 3.0, p.relaxation_freq * 3.0, 20_000);
        let max = grid.iter().map(|&w| psd.value(w)).fold(0.0, f64::max);
        assert!(rel(max, expected) < 0.01);
    }

    #[test]
    fn rin_rejects_bad_inputs() {
        let p = LaserPreset::get(LaserKind::Dpssl).rin;
        assert!(rin_model(&p, 0.0, 1e15, band()).is_err());
        assert!(rin_model(&p, 1.0, -1.0, band()).is_err());
        let swapped = NoiseParams {
            flicker_corner: p.relaxation_freq * 2.0,
            ..p
        };
        assert!(rin_model(&swapped, 1.0, 1e15, band()).is_err());
    }

    #[test]
    fn zero_technical_noise_gives_quantum_floor() {
        let p = NoiseParams {
            white_level: 0.0,
            ..LaserPreset::get(LaserKind::Ecdl).frequency
        };
        let psd = freq_noise_model(&p, 3.5, band()).unwrap();
        for w in quadrature::log_grid(band().lo, band().hi, 3) {
            assert_eq!(psd.value(w), 3.5);
        }
    }

    #[test]
    fn freq_model_continuity_and_rolloff() {
        let p = LaserPreset::get(LaserKind::Ecdl).frequency;
        let psd = freq_noise_model(&p, 0.0, band()).unwrap();
        let (l, r) = psd.one_sided_values(p.flicker_corner);
        assert!(rel(l, r) < 1e-12);
        let drop = linear_to_db(psd.value(p.relaxation_freq) / psd.value(10.0 * p.relaxation_freq));
        assert!(drop >= 30.0, "rolloff {drop} dB");
    }

    #[test]
    fn servo_identity_for_matching_white_levels() {
        let fr = PiecewisePsd::white(7.0, band()).unwrap();
        let s = ServoModel::new(7.0, 7.0, 1e5).unwrap();
        let out = apply_servo(&fr, &s).unwrap();
        for w in quadrature::log_grid(band().lo, band().hi, 5) {
            assert_eq!(out.value(w), fr.value(w));
        }
    }

    #[test]
    fn servoed_ecdl_relaxation_peak_is_20_db() {
        let p = LaserPreset::get(LaserKind::Ecdl).frequency;
        let fr = freq_noise_model(&p, 0.0, band()).unwrap();
        let s = ServoModel::new(4.0 * PI, p.white_level, 2.0 * PI * 1e6).unwrap();
        let psd = apply_servo(&fr, &s).unwrap();
        let wr = 2.0 * PI * 1e9;
        let gain = linear_to_db(psd.value(wr) / psd.value(0.1 * wr));
        assert!((gain - 20.0).abs() <= 0.5, "peak gain {gain} dB");
        assert_eq!(psd.value(1e3), 4.0 * PI);
    }

    #[test]
    fn bump_is_local() {
        let fr = PiecewisePsd::white(100.0, band()).unwrap();
        let base = ServoModel::new(1.0, 100.0, 1e6).unwrap();
        let bumped = base.with_bump(1e4, 100.0).unwrap();
        let a = apply_servo(&fr, &base).unwrap();
        let b = apply_servo(&fr, &bumped).unwrap();
        for w in quadrature::log_grid(band().lo, band().hi, 200) {
            if (w - 1e6).abs() > 3.0 * 1e4 {
                assert_eq!(a.value(w), b.value(w), "ω = {w}");
            }
        }
        // peak lands at ratio × h_b just above ω_srv
        assert!(rel(b.value(1e6 * (1.0 + 1e-12)), 100.0 * 100.0) < 1e-6);
    }

    #[test]
    fn servo_bandwidth_must_be_inside_band() {
        let fr = PiecewisePsd::white(1.0, band()).unwrap();
        let s = ServoModel::new(1.0, 1.0, band().hi * 2.0).unwrap();
        assert!(apply_servo(&fr, &s).is_err());
        assert!(ServoModel::new(1.0, 1.0, 0.0).is_err());
        assert!(ServoModel::new(1.0, 1.0, 1.0).unwrap().with_bump(1.0, 0.5).is_err());
    }

    #[test]
    fn phase_lock_pair_means_above_servo() {
        let b = band();
        let s = ServoModel::new(1.0, 10.0, 1e6).unwrap();
        let f1 = freq_noise_model(&LaserPreset::get(LaserKind::Ecdl).frequency, 0.0, b).unwrap();
        let f2 = f1.scaled(3.0).unwrap();
        let pair = phase_lock_pair(&f1, &f2, &s).unwrap();
        for w in quadrature::log_grid(2e6, b.hi, 10) {
            assert!(rel(pair.value(w), 0.5 * (f1.value(w) + f2.value(w))) < 1e-14);
        }
        let zero = PiecewisePsd::zero(b);
        let half = phase_lock_pair(&f1, &zero, &s).unwrap();
        assert!(rel(half.value(1e8), 0.5 * f1.value(1e8)) < 1e-14);
        assert_eq!(half.value(10.0), 1.0);
    }

    #[test]
    fn phase_lock_pair_rejects_mismatched_bands() {
        let s = ServoModel::new(1.0, 10.0, 1e6).unwrap();
        let a = PiecewisePsd::white(1.0, Band::new(1.0, 1e9).unwrap()).unwrap();
        let b = PiecewisePsd::white(1.0, Band::new(1.0, 1e10).unwrap()).unwrap();
        assert!(matches!(phase_lock_pair(&a, &b, &s), Err(Error::Domain(_))));
    }

    #[test]
    fn phase_conversion() {
        let white = PiecewisePsd::white(5.0, band()).unwrap();
        let ph = freq_to_phase_psd(&white).unwrap();
        assert!(rel(ph.value(1e3), 5.0 / 1e6) < 1e-15);
        let fl = PiecewisePsd::flicker(2.0, 1e4, band()).unwrap();
        let phf = freq_to_phase_psd(&fl).unwrap();
        assert!(rel(phf.value(1e2), 2.0 * 1e4 / 1e6) < 1e-14);
        let zero_band = PiecewisePsd::white(1.0, Band::new(0.0, 1.0).unwrap()).unwrap();
        assert!(freq_to_phase_psd(&zero_band).is_err());
        assert!(phase_to_freq_psd(&zero_band).is_err());
    }

    #[test]
    fn white_linewidth_convention() {
        assert!(rel(white_linewidth(4.0 * PI), 1.0) < 1e-15);
        assert_eq!(linewidth_fwhm(&PiecewisePsd::zero(band()), BetaLine::PiOmega).unwrap(), 0.0);
    }

    #[test]
    fn min_servo_bandwidth_unit_cases() {
        assert!(rel(min_servo_bandwidth_beta(32.0 * LN_2).unwrap(), 1.0) < 1e-15);
        assert_eq!(min_servo_bandwidth_beta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn beta_line_conventions() {
        assert_eq!(BetaLine::default(), BetaLine::PiOmega);
        assert!(rel(BetaLine::DiDomenico.slope(), 16.0 * LN_2 / PI) < 1e-15);
        assert_eq!("di_domenico".parse::<BetaLine>().unwrap(), BetaLine::DiDomenico);
    }

    #[test]
    fn table_csv_import() {
        let csv = "freq,psd\n10,-100\n100,-110\n1000,-120\n";
        let t = Table::from_csv_reader(csv.as_bytes(), FrequencyUnit::Hz, PsdUnit::DbPerHz).unwrap();
        assert_eq!(t.omega().len(), 3);
        let psd = PiecewisePsd::tabulated(t, Band::new(1.0, 1e5).unwrap(), 1e-13);
        // log-log midpoint between decades
        let w = 2.0 * PI * 10f64.powf(1.5);
        assert!(rel(psd.value(w), db_to_linear(-105.0)) < 1e-12);
        // constant extrapolation, then floor
        assert!(rel(psd.value(2.0), 1e-10) < 1e-12);
        assert_eq!(psd.value(1e5), 1e-12);
    }

    #[test]
    fn table_rejects_descending_frequencies() {
        let csv = "100,1\n10,1\n";
        let e = Table::from_csv_reader(csv.as_bytes(), FrequencyUnit::Hz, PsdUnit::Linear).unwrap_err();
        assert!(e.to_string().contains("ascending"));
    }

    #[test]
    fn presets_within_table_ranges() {
        for p in LaserPreset::all() {
            let rin_db = linear_to_db(p.rin.white_level.max(1e-300));
            assert!(p.rin.flicker_corner < p.rin.relaxation_freq);
            match p.kind {
                LaserKind::Ecdl => {
                    assert_eq!(p.rin.white_level, 0.0);
                    assert!((linear_to_db(p.rin.relaxation_peak) - 20.0).abs() < 1e-9);
                }
                _ => assert!((-140.0..=-110.0).contains(&rin_db)),
            }
        }
        assert_eq!("dl".parse::<LaserKind>().unwrap(), LaserKind::Ecdl);
        assert!("HeNe".parse::<LaserKind>().is_err());
    }
}
