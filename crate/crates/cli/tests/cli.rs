// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_laserchi"))
}

fn laserchi(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const SMALL_SWEEP: &str = r#"
[laser]
preset = "ecdl"

[servo]
h_a_rad2_s2_per_hz = 12.566370614359172

[analysis]
mode = "sweep"
rabi_min_rad_s = 628.3185307179587
rabi_max_rad_s = 628318.5307179586
rabi_points = 6
servo_min_rad_s = 6.283185307179586
servo_max_rad_s = 62831853071.79586
servo_points = 12

[output]
csv = "out/sweep.csv"
svg = "out/sweep.svg"
"#;

fn point(preset: &str, servo: f64, rabi: f64) -> String {
    format!(
        r#"
[laser]
preset = "{preset}"

[servo]
h_a_rad2_s2_per_hz = 12.566370614359172
bandwidth_rad_s = {servo:e}

[drive]
rabi_rad_s = {rabi:e}

[analysis]
mode = "point"

[output]
csv = "point.csv"
"#
    )
}

#[test]
fn sweep_writes_versioned_csv_metadata_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.toml", SMALL_SWEEP);
    let o = laserchi(&["run", "s.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# laserchi-csv v1 kind=sweep config_sha256="));
    let sha = first.rsplit('=').next().unwrap();
    assert_eq!(sha.len(), 64);
    assert!(lines.next().unwrap().starts_with("rabi_rad_s,servo_bandwidth_rad_s"));
    assert_eq!(csv.lines().count(), 2 + 6 * 12);
    for region in ["h_b-limited", "servo-limited", "h_a-limited"] {
        assert!(csv.contains(region), "missing {region}");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/sweep.json")).unwrap()).unwrap();
    assert_eq!(meta["config_sha256"], sha);
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["rows"], 72);
    let svg = fs::read_to_string(dir.path().join("out/sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(sha));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        write(d.path(), "s.toml", SMALL_SWEEP);
        assert!(laserchi(&["run", "s.toml"], d.path()).status.success());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("out/sweep.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn mc_compare_is_seeded_and_agrees() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p.toml", &point("ecdl", 6.283185307179586e6, 6.283185307179586e5));
    let run = |seed: &str| {
        let o = laserchi(&["mc-compare", "p.toml", "--n", "200", "--seed", seed], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        (stdout(&o), fs::read(dir.path().join("point_mc.csv")).unwrap())
    };
    let (out1, csv1) = run("7");
    let (_, csv2) = run("7");
    let (_, csv3) = run("8");
    assert_eq!(csv1, csv2);
    assert_ne!(csv1, csv3);
    assert!(out1.contains("agrees = true"), "{out1}");
    // the point run's own output is untouched
    assert!(!dir.path().join("point.csv").exists());
}

#[test]
fn point_run_reports_region_and_floor() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p.toml", &point("dpssl", 6.283185307179586e6, 6.283185307179586e4));
    let o = laserchi(&["run", "p.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("point.csv")).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let get = |k: &str| row[header.iter().position(|h| h == k).unwrap()].to_string();
    let chi: f64 = get("chi_total").parse().unwrap();
    let infid: f64 = get("infidelity").parse().unwrap();
    assert!(chi > 0.0 && (infid - 0.5 * (1.0 - (-chi).exp())).abs() < 1e-15);
    assert!(get("se_floor").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn validate_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    // clean laser, servo well past the χ-separation line
    write(
        dir.path(),
        "clean.toml",
        &point("dpssl", 1e9, 6.283185307179586e4).replace("12.566370614359172", "0.01"),
    );
    let o = laserchi(&["validate", "clean.toml"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("verdict: h_a-limited"), "{}", stdout(&o));

    let rabi = 6.283185307179586e5;
    write(dir.path(), "slow.toml", &point("ecdl", rabi / 10.0, rabi));
    let o = laserchi(&["validate", "slow.toml"], dir.path());
    assert!(stdout(&o).contains("verdict: h_b-limited"), "{}", stdout(&o));
    assert!(stdout(&o).contains("units:"));

    write(dir.path(), "desc.csv", "frequency_hz,psd_db\n1e6,-100\n1e3,-90\n");
    write(
        dir.path(),
        "table.toml",
        &point("ecdl", 1e6, 1e5).replace(
            "preset = \"ecdl\"",
            "frequency_psd = { path = \"desc.csv\", frequency_unit = \"hz\", psd_unit = \"db_per_hz\" }",
        ),
    );
    let o = laserchi(&["validate", "table.toml"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("verdict: rejected") && s.contains("ascending"), "{s}");
}

#[test]
fn tabulated_psd_runs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lo.csv", "frequency_hz,psd_db\n0.1,60\n1e4,20\n1e11,20\n");
    write(
        dir.path(),
        "t.toml",
        &point("ecdl", 1e6, 1e5).replace(
            "preset = \"ecdl\"",
            "frequency_psd = { path = \"lo.csv\", frequency_unit = \"hz\", psd_unit = \"db_per_hz\" }",
        ),
    );
    let o = laserchi(&["run", "t.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.toml", point("ecdl", 1e6, 1e5).replace("[analysis]", "[analysis]\nfoo_hz = 1"), "foo_hz"),
        ("preset.toml", point("nope", 1e6, 1e5), "laser.preset"),
        (
            "both.toml",
            point("ecdl", 1e6, 1e5).replace(
                "[servo]",
                "frequency_psd = { path = \"x.csv\", frequency_unit = \"hz\", psd_unit = \"linear\" }\n[servo]",
            ),
            "not both",
        ),
        (
            "missing.toml",
            point("ecdl", 1e6, 1e5).replace(
                "preset = \"ecdl\"",
                "frequency_psd = { path = \"nowhere.csv\", frequency_unit = \"hz\", psd_unit = \"linear\" }",
            ),
            "does not exist",
        ),
        ("nodrive.toml", point("ecdl", 1e6, 1e5).replace("[drive]\nrabi_rad_s = 1e5", ""), "drive"),
        ("syntax.toml", "[laser\npreset = 1".to_string(), "line"),
    ];
    for (name, body, needle) in cases {
        write(dir.path(), name, &body);
        let o = laserchi(&["run", name], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
}

#[test]
fn divergent_integral_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "big.csv", "frequency_hz,psd\n1,1e300\n1e10,1e300\n");
    write(
        dir.path(),
        "big.toml",
        &point("ecdl", 1e3, 1e5).replace(
            "preset = \"ecdl\"",
            "frequency_psd = { path = \"big.csv\", frequency_unit = \"hz\", psd_unit = \"linear\" }",
        ),
    );
    let o = laserchi(&["run", "big.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("PSD integral"), "{}", stderr(&o));
}

#[test]
fn lines_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = laserchi(&["lines", "--h-a", "12.566", "--rabi", "1e5"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "omega_rad_s,beta_pi_omega,beta_di_domenico,chi_separation");
    assert_eq!(rows.len(), 1 + 6 * 5 + 1);
    // χ line at ω = Ω: h_a (2 + 1)
    let at_rabi: Vec<f64> = rows.iter().find(|r| r.starts_with("1e5,")).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((at_rabi[3] - 3.0 * 12.566).abs() < 1e-9);
    assert!((at_rabi[1] - std::f64::consts::PI * 1e5).abs() < 1e-6);

    let o = laserchi(&["presets"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    for k in ["ECDL", "DPSSL", "MLFL"] {
        assert!(s.contains(&format!("\n{k},")), "{s}");
    }
}
