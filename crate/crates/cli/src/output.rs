// SPDX-License-Identifier: Apache-2.0

//! CSV, JSON metadata and SVG artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Bumped whenever a CSV column is added, removed or renamed.
pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const METADATA_SCHEMA_VERSION: u32 = 1;

/// Numbers are written in shortest round-trip form so identical runs give
/// identical bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub struct Table {
    pub kind: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &'static str, header: Vec<&'static str>) -> Self {
        Self { kind, header, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self, config_sha256: &str) -> Result<Vec<u8>, CliError> {
        let mut out = format!(
            "# laserchi-csv v{CSV_SCHEMA_VERSION} kind={} config_sha256={config_sha256}\n",
            self.kind
        )
        .into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(&self.header).map_err(io)?;
            for r in &self.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush()?;
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path, config_sha256: &str) -> Result<(), CliError> {
        let bytes = self.to_bytes(config_sha256)?;
        write_file(path, &bytes)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config_path: String,
    pub config_sha256: &'a str,
    pub analysis: &'static str,
    pub operation: &'static str,
    pub csv: String,
    pub csv_schema_version: u32,
    pub rows: usize,
    pub tolerances: serde_json::Value,
    pub seeds: Option<serde_json::Value>,
    pub inputs: serde_json::Value,
    pub warnings: Vec<String>,
}

pub fn default_metadata_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_metadata(path: &Path, meta: &Metadata) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(meta).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    write_file(path, s.as_bytes())
}

fn colour(t: f64) -> String {
    // dark blue → yellow
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + 215.0 * t) as u8;
    let g = (30.0 + 200.0 * t) as u8;
    let b = (110.0 - 80.0 * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heat map of log10(infidelity) over a log-log (Ω, ω_srv) grid with
/// optional overlay polylines given in data coordinates.
pub fn heatmap_svg(
    rabis: &[f64],
    servos: &[f64],
    infidelity: &[f64],
    overlays: &[(&str, Vec<(f64, f64)>)],
    config_sha256: &str,
) -> String {
    let (w, h, m) = (640.0, 480.0, 60.0);
    let lx = |x: f64| (x.log10(), rabis[0].log10(), rabis[rabis.len() - 1].log10());
    let ly = |y: f64| (y.log10(), servos[0].log10(), servos[servos.len() - 1].log10());
    let px = |x: f64| {
        let (v, a, b) = lx(x);
        m + if b > a { (v - a) / (b - a) } else { 0.5 } * (w - 2.0 * m)
    };
    let py = |y: f64| {
        let (v, a, b) = ly(y);
        h - m - if b > a { (v - a) / (b - a) } else { 0.5 } * (h - 2.0 * m)
    };
    let logs: Vec<f64> = infidelity.iter().map(|v| v.max(1e-300).log10()).collect();
    let (lo, hi) = logs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let cw = (w - 2.0 * m) / rabis.len() as f64;
    let ch = (h - 2.0 * m) / servos.len() as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, "<!-- config_sha256={config_sha256} -->");
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, _) in rabis.iter().enumerate() {
        for (j, _) in servos.iter().enumerate() {
            let v = logs[i * servos.len() + j];
            let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            let x = m + i as f64 * cw;
            let y = h - m - (j + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cw + 0.3,
                ch + 0.3,
                colour(t)
            );
        }
    }
    for (name, pts) in overlays {
        let path: Vec<String> = pts
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && *y > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y).clamp(m, h - m)))
            .collect();
        if path.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="white" stroke-width="1.5" points="{}"><title>{name}</title></polyline>"#,
                path.join(" ")
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">log10 Ω (rad/s): {:.1} … {:.1}</text>"#,
        w / 2.0,
        h - 20.0,
        lx(rabis[0]).0,
        lx(rabis[rabis.len() - 1]).0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">log10 ω_srv (rad/s): {:.1} … {:.1}</text>"#,
        h / 2.0,
        h / 2.0,
        ly(servos[0]).0,
        ly(servos[servos.len() - 1]).0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-size="13" text-anchor="middle">log10 infidelity: {lo:.2} (dark) … {hi:.2} (light)</text>"#,
        w / 2.0
    );
    s.push_str("</svg>\n");
    s
}
