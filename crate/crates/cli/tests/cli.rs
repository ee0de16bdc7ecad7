use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qrc() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qrc"));
    c.env_remove("QRC_OUT_DIR");
    c
}

fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(out.status.code().is_some(), "terminated by signal");
    out
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

const GOOD: &str = "[channel]\nfamily = lindblad_good\ngamma = 1\nh = 1\ndt = 1\n[input]\nlo = 0\nhi = 1\n[run]\nseed = 3\nrandom_points = 100\n";
const BAD: &str = "[channel]\nfamily = lindblad_bad\ngamma = 1\nh = 1\ndt = 1\n[run]\nseed = 5\nrandom_points = 100\n";
const ING: &str = "[channel]\nfamily = lindblad_ing\ngamma = 1\nh = 1\ndt = 1\n";
const DEP: &str = "[channel]\nfamily = depolarizing\nlambda_min = 0.1\nlambda_max = 0.9\n[run]\nrandom_points = 50\n";

fn analyze(dir: &Path, spec: &str, name: &str, extra: &[&str]) -> (Value, Vec<u8>) {
    let spec = write_spec(dir, &format!("{name}.spec"), spec);
    let out = dir.join(format!("{name}.json"));
    let o = run(qrc().args(["analyze", "--spec"]).arg(&spec).arg("--out").arg(&out).args(extra));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&out).unwrap();
    (serde_json::from_slice(&bytes).unwrap(), bytes)
}

#[test]
fn analyze_good_is_certified_with_input_dependent_fixed_points() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = analyze(dir.path(), GOOD, "good", &["--lattice", "21"]);
    assert_eq!(v["assertions"]["esp_certified"], true);
    assert_eq!(v["assertions"]["input_dependent_fixed_points"], true);
    assert_eq!(v["assertions"]["constant_filter"], false);
    assert_eq!(v["theorems"]["consistent"], true);
    assert!(v["theorems"]["filter_spread"].as_f64().unwrap() > 1e-3);
    let rho = &v["fixed_points"]["reference"]["rho"];
    assert!((rho[0][0][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
    assert!((rho[0][1][1].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
    assert!(v["closed_form"]["max_abs_diff_vs_expm"].as_f64().unwrap() < 1e-8);
}

#[test]
fn analyze_bad_reports_constant_filter() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = analyze(dir.path(), BAD, "bad", &["--lattice", "11"]);
    assert_eq!(v["assertions"]["esp_certified"], true);
    assert_eq!(v["assertions"]["constant_filter"], true);
    assert_eq!(v["esp"]["verdict"]["norm"]["norm"], "spectral");
    assert!((v["esp"]["verdict"]["sup"].as_f64().unwrap() - (-0.5f64).exp()).abs() < 1e-12);
    let filter = &v["theorems"]["constant_filter"];
    assert!((filter[1][1][0].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(filter[0][0][0].as_f64().unwrap().abs() < 1e-10);
    let q = v["q_pauli"].as_array().unwrap();
    assert!((q[2].as_f64().unwrap() - ((-1.0f64).exp() - 1.0)).abs() < 1e-12);
}

#[test]
fn analyze_depolarizing_is_unital() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = analyze(dir.path(), DEP, "dep", &["--lattice", "11"]);
    assert_eq!(v["assertions"]["unital"], true);
    assert_eq!(v["theorems"]["unital_trivial"], true);
    let f = &v["theorems"]["constant_filter"];
    assert!((f[0][0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn analyze_ing_reports_necessary_condition_failure_at_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = analyze(dir.path(), ING, "ing", &["--lattice", "11"]);
    assert_eq!(v["esp"]["verdict"]["verdict"], "necessary_condition_failed");
    assert_eq!(v["esp"]["verdict"]["z"][0].as_f64(), Some(0.0));
    assert!(v["fixed_points"]["error"].is_string());
    assert!(v["theorems"]["skipped"].is_string());
}

#[test]
fn analyze_is_byte_identical_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = analyze(dir.path(), GOOD, "a", &["--lattice", "11"]);
    let (_, b) = analyze(dir.path(), GOOD, "b", &["--lattice", "11"]);
    assert_eq!(a, b);
    let (_, c) = analyze(dir.path(), GOOD, "c", &["--lattice", "11", "--seed", "99"]);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn scan_marks_singular_locus_and_matches_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "ing.spec", ING);
    let out = dir.path().join("scan.csv");
    let o = run(qrc().args(["scan", "--spec"]).arg(&spec).arg("--out").arg(&out).args(["--lattice", "20"]));
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "h_t,gamma,sigma1,sigma2,sigma3,max_eig_mod_traceless");
    assert_eq!(rows.len(), 400);
    let mut empty = 0;
    for r in &rows {
        assert_eq!(r.len(), 6);
        let (h, g): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        if h == g {
            assert!(r[2..].iter().all(|c| c.is_empty()));
            empty += 1;
        } else {
            let s2: f64 = r[3].parse().unwrap();
            let s3: f64 = r[4].parse().unwrap();
            assert!(s2 < 1.0 && s3 < 1.0);
            assert_eq!(r[2].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
        }
    }
    assert_eq!(empty, 20);

    // single-point scan vs analyze at the same (h_t, gamma)
    let point = "[channel]\nfamily = lindblad_good\ngamma = 0.7\nh = 1.3\ndt = 1\n[run]\nlattice = 1\nscan_h_max = 1.3\nscan_gamma_max = 0.7\nrandom_points = 0\n";
    let spec = write_spec(dir.path(), "pt.spec", point);
    let out = dir.path().join("pt.csv");
    run(qrc().args(["scan", "--spec"]).arg(&spec).arg("--out").arg(&out));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let (v, _) = analyze(dir.path(), point, "pt", &[]);
    let mut from_scan: Vec<f64> = rows[0][2..5].iter().map(|c| c.parse().unwrap()).collect();
    let mut from_analyze: Vec<f64> = v["singular_values_p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    from_scan.sort_by(f64::total_cmp);
    from_analyze.sort_by(f64::total_cmp);
    for (a, b) in from_scan.iter().zip(&from_analyze) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn scan_rejects_non_lindblad_family() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "dep.spec", DEP);
    let o = run(qrc().args(["scan", "--spec"]).arg(&spec).arg("--out").arg(dir.path().join("x.csv")));
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn drive_bad_converges_and_matches_analyze_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.spec", BAD);
    let out = dir.path().join("drive.csv");
    let o = run(qrc().args(["drive", "--spec"]).arg(&spec).arg("--out").arg(&out).args(["--steps", "80"]));
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "t,z_t,sx,sy,sz");
    assert_eq!(rows.len(), 80);
    for r in rows.iter().filter(|r| r[0].parse::<usize>().unwrap() >= 50) {
        let s: Vec<f64> = r[2..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(s[0].abs() < 1e-8 && s[1].abs() < 1e-8 && (s[2] + 1.0).abs() < 1e-8, "{r:?}");
        let z: f64 = r[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&z));
    }
    let (v, _) = analyze(dir.path(), BAD, "bad", &["--lattice", "5"]);
    let p = v["fixed_points"]["reference"]["pauli"].as_array().unwrap();
    let last: Vec<f64> = rows.last().unwrap()[2..].iter().map(|c| c.parse().unwrap()).collect();
    for (a, b) in last.iter().zip(p) {
        assert!((a - b.as_f64().unwrap()).abs() < 1e-8);
    }
}

#[test]
fn drive_good_keeps_responding() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "good.spec", GOOD);
    let out = dir.path().join("drive.csv");
    run(qrc().args(["drive", "--spec"]).arg(&spec).arg("--out").arg(&out).args(["--steps", "500"]));
    let (_, rows) = csv_rows(&out);
    let late: Vec<Vec<f64>> = rows[99..].iter().map(|r| r[2..].iter().map(|c| c.parse().unwrap()).collect()).collect();
    assert!(late.iter().all(|s| s[0].abs() < 1e-8));
    for k in [1, 2] {
        let xs: Vec<f64> = late.iter().map(|s| s[k]).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        assert!(sd > 1e-3);
    }
}

#[test]
fn drive_zero_steps_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "good.spec", GOOD);
    let out = dir.path().join("drive.csv");
    let o = run(qrc().args(["drive", "--spec"]).arg(&spec).arg("--out").arg(&out).args(["--steps", "0"]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "t,z_t,sx,sy,sz\n");
}

#[test]
fn drive_rejects_qutrit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "d3.spec", "[channel]\nfamily = depolarizing\nd = 3\nlambda = 0.2\n");
    let o = run(qrc().args(["drive", "--spec"]).arg(&spec).arg("--out").arg(dir.path().join("d.csv")));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "good.spec", GOOD);
    let outdir = dir.path().join("artifacts");
    let o = run(qrc().env("QRC_OUT_DIR", &outdir).args(["drive", "--spec"]).arg(&spec).args(["--steps", "3"]));
    assert_eq!(o.status.code(), Some(0));
    assert!(outdir.join("drive.csv").exists());
    let leftovers: Vec<_> = std::fs::read_dir(&outdir).unwrap().filter_map(Result::ok).filter(|e| e.file_name().to_string_lossy().contains(".tmp")).collect();
    assert!(leftovers.is_empty());
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(dir.path(), "broken.spec", "[channel]\nfamily = teleporter\n");
    let o = run(qrc().args(["analyze", "--spec"]).arg(&bad).arg("--out").arg(dir.path().join("r.json")));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown family"));
    let o = run(qrc().args(["analyze", "--spec"]).arg(dir.path().join("missing.spec")));
    assert_eq!(o.status.code(), Some(2));
    let o = run(qrc().args(["analyze"]));
    assert_eq!(o.status.code(), Some(2));
    let spec = write_spec(dir.path(), "good.spec", GOOD);
    let o = run(qrc().args(["analyze", "--spec"]).arg(&spec).args(["--lattice", "0"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_filter_and_forced_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = run(qrc().args(["verify", "--filter", "example_good", "--out"]).arg(&out));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(!ids.is_empty());
    assert!(ids.iter().all(|id| id.contains("example_good") || *id == "c10_blend_filter"), "{ids:?}");
    assert!(v["checks"][0]["elapsed_ms"].is_number());

    let o = run(qrc().args(["verify", "--filter", "c2", "--tolerance", "1e-30"]));
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL") && stdout.contains("expected: < 1.0e-30"));

    let o = run(qrc().args(["verify", "--filter", "no_such_check"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bundled_specs_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let specs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let mut count = 0;
    for entry in std::fs::read_dir(&specs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "spec") {
            let out = dir.path().join("r.json");
            let o = run(qrc().args(["analyze", "--spec"]).arg(&path).arg("--out").arg(&out).args(["--lattice", "5"]));
            assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
            count += 1;
        }
    }
    assert_eq!(count, 7);
}
