// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use laserchi_core::coupling::{assemble_channels, Drive, NoiseChannelPsd};
use laserchi_core::fidelity::*;
use laserchi_core::filter::{Channel, FilterFunction, GeneralFilter, SequenceFilter};
use laserchi_core::mc::{ensemble_fidelity, McScenario};
use laserchi_core::psd::*;
use laserchi_core::quadrature::log_grid;
use serde_json::json;

use crate::config::{self, Analysis, Loaded, McCfg};
use crate::error::CliError;
use crate::output::{self, num, Metadata, Table};
use crate::scenario::{self, Built, Op};

fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn servo(l: &Loaded, b: &Built, bandwidth: f64) -> Result<ServoModel, CliError> {
    let mut s = ServoModel::new(l.scenario.servo.h_a_rad2_s2_per_hz, b.h_b, bandwidth)?;
    s.bump = b.bump;
    s.validate()?;
    Ok(s)
}

fn filters(op: &Op, rabi: f64) -> Result<(Box<dyn FilterFunction>, Box<dyn FilterFunction>), CliError> {
    Ok(match op {
        Op::Named(o) => (o.filter(rabi, Channel::Dephasing)?, o.filter(rabi, Channel::Amplitude)?),
        Op::Custom(seq) => (
            Box::new(SequenceFilter::new(seq, Channel::Dephasing)),
            Box::new(SequenceFilter::new(seq, Channel::Amplitude)),
        ),
    })
}

fn drive_rabi(b: &Built, op: &Op) -> f64 {
    match (b.rabi, op) {
        (Some(r), _) => r,
        (None, Op::Custom(seq)) => seq.max_rabi(),
        (None, Op::Named(_)) => unreachable!("checked at load"),
    }
}

fn channels(l: &Loaded, b: &Built, rabi: f64, bandwidth: f64) -> Result<(PiecewisePsd, NoiseChannelPsd), CliError> {
    let s_lo = apply_servo(&b.free_running, &servo(l, b, bandwidth)?)?;
    let rin = scenario::rin(l, b)?.unwrap_or_else(|| PiecewisePsd::zero(b.band));
    let ch = assemble_channels(&s_lo, &rin, &b.qubit, &Drive { rabi, stark: b.stark })?;
    Ok((s_lo, ch))
}

fn tolerances_json(b: &Built) -> serde_json::Value {
    json!({
        "chi_rel_tol": b.chi.rel_tol,
        "chi_max_evals": b.chi.max_evals,
        "knots_per_decade": b.chi.knots_per_decade,
        "average_high_frequencies": b.chi.average_high_frequencies,
    })
}

fn inputs_json(l: &Loaded, b: &Built) -> serde_json::Value {
    json!({
        "scenario": serde_json::to_value(&l.scenario).unwrap_or_default(),
        "band_rad_s": [b.band.lo, b.band.hi],
        "h_b_rad2_s2_per_hz": b.h_b,
        "rabi_rad_s": b.rabi,
        "qubit": format!("{:?}", b.qubit),
    })
}

struct Artifacts {
    table: Table,
    seeds: Option<serde_json::Value>,
    warnings: Vec<String>,
    svg: Option<String>,
    extra_csv: Option<Table>,
}

pub fn run(path: &Path) -> Result<(), CliError> {
    let l = config::load(path)?;
    let b = scenario::build(&l)?;
    let op = scenario::operation(&l)?;
    let art = match &l.scenario.analysis {
        Analysis::Point {} => run_point(&l, &b, &op)?,
        Analysis::Sweep(_) => run_sweep(&l, &b, &op)?,
        Analysis::McCompare(m) => run_mc(&l, &b, &op, *m)?,
    };
    emit(&l, &b, &op, art)
}

fn emit(l: &Loaded, b: &Built, op: &Op, art: Artifacts) -> Result<(), CliError> {
    let out = &l.scenario.output;
    let csv_path = l.resolve(&out.csv);
    art.table.write(&csv_path, &l.sha256)?;
    if let (Some(extra), Some(p)) = (&art.extra_csv, &out.per_realization_csv) {
        extra.write(&l.resolve(p), &l.sha256)?;
    }
    let mut warnings = art.warnings;
    match (&art.svg, &out.svg) {
        (Some(svg), Some(p)) => output::write_file(&l.resolve(p), svg.as_bytes())?,
        (None, Some(_)) => warnings.push(format!("no plot is defined for analysis `{}`; SVG skipped", l.scenario.analysis.name())),
        _ => {}
    }
    let meta_path = out
        .metadata
        .as_ref()
        .map(|p| l.resolve(p))
        .unwrap_or_else(|| output::default_metadata_path(&csv_path));
    let meta = Metadata {
        schema_version: output::METADATA_SCHEMA_VERSION,
        tool: "laserchi",
        tool_version: env!("CARGO_PKG_VERSION"),
        config_path: l.path.display().to_string(),
        config_sha256: &l.sha256,
        analysis: l.scenario.analysis.name(),
        operation: op.label(),
        csv: csv_path.display().to_string(),
        csv_schema_version: output::CSV_SCHEMA_VERSION,
        rows: art.table.rows.len(),
        tolerances: tolerances_json(b),
        seeds: art.seeds,
        inputs: inputs_json(l, b),
        warnings: warnings.clone(),
    };
    output::write_metadata(&meta_path, &meta)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} ({} rows) and {}", csv_path.display(), art.table.rows.len(), meta_path.display());
    Ok(())
}

fn run_point(l: &Loaded, b: &Built, op: &Op) -> Result<Artifacts, CliError> {
    let rabi = drive_rabi(b, op);
    let bw = l.scenario.servo.bandwidth_rad_s.expect("checked at load");
    let h_a = l.scenario.servo.h_a_rad2_s2_per_hz;
    let (s_lo, ch) = channels(l, b, rabi, bw)?;
    let (fd, fa) = filters(op, rabi)?;
    let r = chi_channels(&ch, fd.as_ref(), fa.as_ref(), b.chi)?;
    let gf = GeneralFilter::pi_pulse(rabi)?;
    let region = classify_region(&gf, h_a, b.h_b, bw)?;
    let w_chi = chi_separation_servo(&gf, h_a, b.h_b.max(h_a))?;
    let eps = se_floor(&b.qubit, rabi)?;
    let dominant = r
        .decades_dephasing
        .iter()
        .chain(&r.decades_amplitude)
        .max_by(|a, c| a.chi.total_cmp(&c.chi))
        .map(|d| d.decade)
        .unwrap_or(0);
    let mut t = Table::new(
        "point",
        vec![
            "rabi_rad_s",
            "servo_bandwidth_rad_s",
            "h_a_rad2_s2_per_hz",
            "h_b_rad2_s2_per_hz",
            "chi_dephasing",
            "chi_amplitude",
            "chi_total",
            "infidelity",
            "region",
            "omega_chi_rad_s",
            "se_floor",
            "ha_limit_rad2_s2_per_hz",
            "linewidth_free_running_hz",
            "linewidth_servoed_hz",
            "dominant_decade_log10_rad_s",
        ],
    );
    t.push(vec![
        num(rabi),
        num(bw),
        num(h_a),
        num(b.h_b),
        num(r.chi_dephasing),
        num(r.chi_amplitude),
        num(r.chi_total),
        num(r.infidelity),
        region.to_string(),
        num(w_chi),
        num(eps),
        num(ha_limit(&gf, eps)?),
        num(linewidth_fwhm(&b.free_running, BetaLine::PiOmega)?),
        num(linewidth_fwhm(&s_lo, BetaLine::PiOmega)?),
        dominant.to_string(),
    ]);
    let mut warnings = vec![];
    if r.infidelity > eps {
        warnings.push(format!("laser-noise infidelity {:.3e} exceeds the spontaneous-emission floor {eps:.3e}", r.infidelity));
    }
    Ok(Artifacts {
        table: t,
        seeds: None,
        warnings,
        svg: None,
        extra_csv: None,
    })
}

fn run_sweep(l: &Loaded, b: &Built, op: &Op) -> Result<Artifacts, CliError> {
    let Analysis::Sweep(w) = l.scenario.analysis else { unreachable!() };
    let Op::Named(operation) = op else { unreachable!("checked at load") };
    let h_a = l.scenario.servo.h_a_rad2_s2_per_hz;
    let rin = scenario::rin(l, b)?.map(|rin| RinCoupling {
        rin,
        qubit: b.qubit,
        stark: b.stark,
    });
    let sc = LandscapeScenario {
        free_running: b.free_running.clone(),
        h_a,
        h_b: b.h_b,
        bump: b.bump,
        operation: *operation,
        rin,
        chi: b.chi,
    };
    let rabis = log_axis(w.rabi_min_rad_s, w.rabi_max_rad_s, w.rabi_points);
    let servos = log_axis(w.servo_min_rad_s, w.servo_max_rad_s, w.servo_points);
    let rows = sweep(&sc, &grid_points(&rabis, &servos))?;
    let mut t = Table::new(
        "sweep",
        vec![
            "rabi_rad_s",
            "servo_bandwidth_rad_s",
            "h_b_rad2_s2_per_hz",
            "chi_dephasing",
            "chi_amplitude",
            "chi_total",
            "infidelity",
            "region",
        ],
    );
    for r in &rows {
        t.push(vec![
            num(r.rabi),
            num(r.servo_bandwidth),
            num(r.h_b),
            num(r.chi_dephasing),
            num(r.chi_amplitude),
            num(r.chi_total),
            num(r.infidelity),
            r.region.to_string(),
        ]);
    }
    let infid: Vec<f64> = rows.iter().map(|r| r.infidelity).collect();
    let cut: Vec<(f64, f64)> = rabis.iter().map(|&r| (r, r)).collect();
    let chi_line: Vec<(f64, f64)> = rabis
        .iter()
        .map(|&r| {
            let gf = GeneralFilter::pi_pulse(r).expect("positive Rabi frequency");
            (r, chi_separation_servo(&gf, h_a, b.h_b.max(h_a)).unwrap_or(f64::NAN))
        })
        .collect();
    let svg = output::heatmap_svg(&rabis, &servos, &infid, &[("ω_srv = Ω", cut), ("ω_srv = ω_χ", chi_line)], &l.sha256);
    let mut warnings = vec![];
    let saturated = infid.iter().filter(|&&x| x >= 0.5 * (1.0 - 1e-9)).count();
    if saturated > 0 {
        warnings.push(format!("{saturated} grid points are fully dephased (infidelity ≈ 1/2)"));
    }
    Ok(Artifacts {
        table: t,
        seeds: None,
        warnings,
        svg: Some(svg),
        extra_csv: None,
    })
}

pub struct McPlan {
    pub scenario: McScenario,
    pub band: Band,
    pub full_band_chi: ChiBreakdown,
}

/// Noise restricted to the synthesis band; `S_Δ = 4 S_z`, `S_Ω = 4 S_θ`.
pub fn mc_plan(l: &Loaded, b: &Built, op: &Op, m: &McCfg) -> Result<McPlan, CliError> {
    let rabi = drive_rabi(b, op);
    let bw = l.scenario.servo.bandwidth_rad_s.expect("checked at load");
    let seq = op.sequence(rabi)?;
    let max_rabi = seq.max_rabi();
    let band = Band::new(
        m.band_lo_rad_s.unwrap_or(1e-3 * max_rabi).max(b.band.lo),
        m.band_hi_rad_s.unwrap_or(20.0 * max_rabi).min(b.band.hi),
    )
    .map_err(|e| CliError::Config(format!("key `analysis.band_*_rad_s`: {e}")))?;
    let (_, ch) = channels(l, b, rabi, bw)?;
    let (fd, fa) = filters(op, rabi)?;
    let full_band_chi = chi_channels(&ch, fd.as_ref(), fa.as_ref(), b.chi)?;
    let detuning = ch.s_z.restricted(band)?.scaled(4.0)?;
    let rabi_noise = if l.scenario.laser.include_rin {
        Some(ch.s_theta.restricted(band)?.scaled(4.0)?)
    } else {
        None
    };
    Ok(McPlan {
        scenario: McScenario {
            sequence: seq,
            detuning: Some(detuning),
            rabi_noise,
            dt: 2.0 * PI / (m.steps_per_period * band.hi),
            cells_per_decade: m.cells_per_decade,
        },
        band,
        full_band_chi,
    })
}

fn run_mc(l: &Loaded, b: &Built, op: &Op, m: McCfg) -> Result<Artifacts, CliError> {
    let plan = mc_plan(l, b, op, &m)?;
    let ff = plan.scenario.filter_prediction(b.chi)?;
    let mc = ensemble_fidelity(&plan.scenario, m.n_realizations, m.seed)?;
    let diff = mc.mean_fidelity - ff.fidelity;
    let tol = (3.0 * mc.std_error).max(0.1 * ff.infidelity);
    let mut t = Table::new(
        "mc_compare",
        vec![
            "n_realizations",
            "seed",
            "rng",
            "band_lo_rad_s",
            "band_hi_rad_s",
            "dt_s",
            "chi_dephasing",
            "chi_amplitude",
            "fidelity_ff",
            "fidelity_mc",
            "std_error_mc",
            "discrepancy",
            "tolerance",
            "agrees",
            "state_fidelity_mc",
            "chi_total_full_band",
        ],
    );
    t.push(vec![
        m.n_realizations.to_string(),
        m.seed.to_string(),
        mc.rng.clone(),
        num(plan.band.lo),
        num(plan.band.hi),
        num(plan.scenario.dt),
        num(ff.chi_dephasing),
        num(ff.chi_amplitude),
        num(ff.fidelity),
        num(mc.mean_fidelity),
        num(mc.std_error),
        num(diff),
        num(tol),
        (diff.abs() <= tol).to_string(),
        num(mc.mean_state_fidelity),
        num(plan.full_band_chi.chi_total),
    ]);
    let mut per = Table::new("mc_per_realization", vec!["index", "seed", "gate_fidelity"]);
    for (k, f) in mc.per_realization.iter().enumerate() {
        per.push(vec![k.to_string(), (m.seed ^ k as u64).to_string(), num(*f)]);
    }
    let mut warnings = vec![];
    let outside = 1.0 - ff.chi_total / plan.full_band_chi.chi_total.max(f64::MIN_POSITIVE);
    if plan.full_band_chi.chi_total > 0.0 && outside > 0.01 {
        warnings.push(format!(
            "{:.1}% of the full-band χ lies outside the synthesis band; the comparison covers the in-band part only",
            100.0 * outside
        ));
    }
    Ok(Artifacts {
        table: t,
        seeds: Some(json!({
            "base_seed": m.seed,
            "per_realization": "seed XOR index",
            "rng": mc.rng,
        })),
        warnings,
        svg: None,
        extra_csv: Some(per),
    })
}

/// `mc-compare`: the Monte Carlo comparison for any point-like config.
pub fn mc_compare(path: &Path, n: Option<usize>, seed: Option<u64>) -> Result<(), CliError> {
    let mut l = config::load(path)?;
    let mut m = match &l.scenario.analysis {
        Analysis::McCompare(m) => *m,
        Analysis::Point {} => {
            // keep the point run's own artifacts intact
            let out = &mut l.scenario.output;
            let stem = out.csv.file_stem().and_then(|s| s.to_str()).unwrap_or("results").to_string();
            out.csv.set_file_name(format!("{stem}_mc.csv"));
            out.metadata = None;
            toml::from_str::<McCfg>("").map_err(|e| CliError::Config(e.to_string()))?
        }
        Analysis::Sweep(_) => return Err(CliError::Config("key `analysis.mode`: mc-compare needs a point or mc_compare config".into())),
    };
    if let Some(n) = n {
        if n < 2 {
            return Err(CliError::Config("--n: need at least 2 realisations".into()));
        }
        m.n_realizations = n;
    }
    if let Some(s) = seed {
        m.seed = s;
    }
    l.scenario.analysis = Analysis::McCompare(m);
    let b = scenario::build(&l)?;
    let op = scenario::operation(&l)?;
    let art = run_mc(&l, &b, &op, m)?;
    let row = &art.table.rows[0];
    println!("F_FF = {}  F_MC = {} ± {}  discrepancy = {}  agrees = {}", row[8], row[9], row[10], row[11], row[13]);
    emit(&l, &b, &op, art)
}

pub fn validate(path: &Path) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config: {}", path.display());
    let l = match config::load(path) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(out, "rejected: {e}");
            let _ = writeln!(out, "verdict: rejected");
            return out;
        }
    };
    let _ = writeln!(out, "config_sha256: {}", l.sha256);
    let _ = writeln!(out, "units:");
    for u in [
        "frequencies are angular (rad/s) unless the key says _hz",
        "PSDs are single-sided; frequency noise in (rad/s)^2/Hz, RIN in 1/Hz",
        "white frequency noise h corresponds to a Lorentzian FWHM of h/(4 pi) Hz",
        "chi = (1/pi) * integral of S(w) F(w) / w^2 dw; fidelity = (1 + exp(-chi)) / 2",
    ] {
        let _ = writeln!(out, "  - {u}");
    }
    for (k, t) in [("laser.frequency_psd", &l.scenario.laser.frequency_psd), ("laser.rin_psd", &l.scenario.laser.rin_psd)] {
        if let Some(t) = t {
            let _ = writeln!(out, "  - {k}: frequency column in {}, PSD column {}", t.frequency_unit, t.psd_unit);
        }
    }
    let b = match scenario::build(&l) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(out, "rejected: {e}");
            let _ = writeln!(out, "verdict: rejected");
            return out;
        }
    };
    let mut checks: Vec<(String, bool)> = vec![];
    let inside = |w: f64| w > b.band.lo && w < b.band.hi;
    let h_a = l.scenario.servo.h_a_rad2_s2_per_hz;
    checks.push((format!("h_b ({:.4e}) ≥ h_a ({h_a:.4e})", b.h_b), b.h_b >= h_a));
    let op = scenario::operation(&l);
    let mut verdict = String::new();
    match (&l.scenario.analysis, &op) {
        (Analysis::Sweep(w), _) => {
            checks.push(("Rabi axis inside PSD band".into(), inside(w.rabi_min_rad_s) && inside(w.rabi_max_rad_s)));
            checks.push(("servo axis inside PSD band".into(), inside(w.servo_min_rad_s) && inside(w.servo_max_rad_s)));
            let mut counts = [0usize; 3];
            for r in log_axis(w.rabi_min_rad_s, w.rabi_max_rad_s, w.rabi_points) {
                let gf = GeneralFilter::pi_pulse(r).expect("positive Rabi frequency");
                for s in log_axis(w.servo_min_rad_s, w.servo_max_rad_s, w.servo_points) {
                    if let Ok(reg) = classify_region(&gf, h_a, b.h_b, s) {
                        counts[reg as usize] += 1;
                    }
                }
            }
            verdict = format!(
                "sweep grid: {} h_b-limited, {} servo-limited, {} h_a-limited",
                counts[Region::HbLimited as usize],
                counts[Region::ServoLimited as usize],
                counts[Region::HaLimited as usize]
            );
        }
        (_, Ok(op)) => {
            let rabi = drive_rabi(&b, op);
            let bw = l.scenario.servo.bandwidth_rad_s.expect("checked at load");
            checks.push((format!("Rabi frequency {rabi:.4e} inside PSD band"), inside(rabi)));
            checks.push((format!("servo bandwidth {bw:.4e} inside PSD band"), inside(bw)));
            if let Analysis::McCompare(m) = &l.scenario.analysis {
                match mc_plan(&l, &b, op, m) {
                    Ok(p) => {
                        let nyq = PI / p.scenario.dt;
                        checks.push((
                            format!("Nyquist: synthesis band top {:.4e} < π/dt = {nyq:.4e}", p.band.hi),
                            p.band.hi < nyq,
                        ));
                        let covered = p.scenario.filter_prediction(b.chi).map(|c| c.chi_total).unwrap_or(f64::NAN);
                        let frac = covered / p.full_band_chi.chi_total;
                        let _ = writeln!(out, "Monte Carlo: synthesis band holds {:.1}% of the full-band χ", 100.0 * frac);
                    }
                    Err(e) => checks.push((format!("Monte Carlo set-up: {e}"), false)),
                }
            }
            if inside(rabi) && inside(bw) {
                let gf = GeneralFilter::pi_pulse(rabi).expect("positive Rabi frequency");
                if let Ok(sv) = servo(&l, &b, bw).and_then(|s| Ok(apply_servo(&b.free_running, &s)?)) {
                    let exceed = log_grid(bw, b.band.hi, 20)
                        .into_iter()
                        .filter(|&w| w > bw && w < b.band.hi)
                        .find(|&w| sv.value(w) > chi_separation_threshold(&gf, h_a, w));
                    let _ = match exceed {
                        Some(w) => writeln!(out, "χ-separation: free-running noise exceeds the line above ω_srv (first at ω = {w:.4e} rad/s)"),
                        None => writeln!(out, "χ-separation: free-running noise stays below the line above ω_srv"),
                    };
                }
                if let Ok(reg) = classify_region(&gf, h_a, b.h_b, bw) {
                    verdict = reg.to_string();
                }
            }
        }
        (_, Err(e)) => checks.push((format!("operation: {e}"), false)),
    }
    let _ = writeln!(out, "checks:");
    for (c, ok) in &checks {
        let _ = writeln!(out, "  [{}] {c}", if *ok { "ok" } else { "FAIL" });
    }
    if checks.iter().any(|c| !c.1) {
        let _ = writeln!(out, "verdict: rejected");
    } else {
        let _ = writeln!(out, "verdict: {verdict}");
    }
    out
}

pub struct LinesArgs {
    pub h_a: f64,
    pub rabi: f64,
    pub h_b: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub per_decade: usize,
}

pub fn lines(a: &LinesArgs) -> Result<String, CliError> {
    if !(a.h_a >= 0.0 && a.rabi > 0.0) {
        return Err(CliError::Config("--h-a must be ≥ 0 and --rabi > 0".into()));
    }
    let lo = a.lo.unwrap_or(a.rabi * 1e-3);
    let hi = a.hi.unwrap_or(a.rabi * 1e3);
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Config("need 0 < --lo < --hi".into()));
    }
    if a.per_decade == 0 {
        return Err(CliError::Config("--per-decade must be ≥ 1".into()));
    }
    let gf = GeneralFilter::pi_pulse(a.rabi)?;
    let mut out = String::new();
    let _ = writeln!(out, "# laserchi-csv v{} kind=lines h_a={} rabi={}", output::CSV_SCHEMA_VERSION, num(a.h_a), num(a.rabi));
    let _ = writeln!(out, "# beta-line white crossing (pi_omega) = {} rad/s", num(BetaLine::PiOmega.white_crossing(a.h_a)));
    let _ = writeln!(out, "# ha_limit for eps = 1e-6: {} (rad/s)^2/Hz", num(ha_limit(&gf, 1e-6)?));
    if let Some(h_b) = a.h_b {
        let _ = writeln!(out, "# omega_chi = {} rad/s", num(chi_separation_servo(&gf, a.h_a, h_b)?));
        let _ = writeln!(out, "# min servo bandwidth for narrowing = {} Hz", num(min_servo_bandwidth_beta(h_b)?));
    }
    let _ = writeln!(out, "omega_rad_s,beta_pi_omega,beta_di_domenico,chi_separation");
    for w in log_grid(lo, hi, a.per_decade) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(w),
            num(BetaLine::PiOmega.threshold(w)),
            num(BetaLine::DiDomenico.threshold(w)),
            num(chi_separation_threshold(&gf, a.h_a, w))
        );
    }
    Ok(out)
}

pub fn presets() -> Result<String, CliError> {
    let mut t = Table::new(
        "presets",
        vec![
            "laser",
            "rin_flicker_corner_rad_s",
            "rin_white_per_hz",
            "rin_relaxation_peak",
            "rin_relaxation_rad_s",
            "freq_flicker_corner_rad_s",
            "freq_white_rad2_s2_per_hz",
            "freq_relaxation_peak",
            "freq_relaxation_rad_s",
            "white_linewidth_hz",
            "linewidth_fwhm_hz",
            "min_servo_bandwidth_hz",
        ],
    );
    for p in LaserPreset::all() {
        let f = p.frequency;
        let psd = freq_noise_model(&f, 0.0, Band::default())?;
        t.push(vec![
            p.kind.to_string(),
            num(p.rin.flicker_corner),
            num(p.rin.white_level),
            num(p.rin.relaxation_peak),
            num(p.rin.relaxation_freq),
            num(f.flicker_corner),
            num(f.white_level),
            num(f.relaxation_peak),
            num(f.relaxation_freq),
            num(white_linewidth(f.white_level)),
            num(linewidth_fwhm(&psd, BetaLine::PiOmega)?),
            num(min_servo_bandwidth_beta(f.white_level)?),
        ]);
    }
    let bytes = t.to_bytes("none")?;
    Ok(String::from_utf8(bytes).expect("ASCII CSV"))
}
