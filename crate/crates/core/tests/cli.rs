use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nhbracket::timeseries::TimeSeries;

fn nhbracket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhbracket")).args(args).output().expect("binary runs")
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Copy a shipped scenario into `dir` so its outputs land there.
fn staged(dir: &Path, name: &str) -> PathBuf {
    let dst = dir.join(name);
    std::fs::copy(scenario_dir().join(name), &dst).unwrap();
    dst
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn spectrum_of_exceptional_point() {
    let out = nhbracket(&["spectrum", "pt_dimer(1, 1)"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.0000000000000000e0 0.0000000000000000e0\n".repeat(2));
}

#[test]
fn spectrum_of_unbroken_dimer() {
    let out = nhbracket(&["spectrum", "pt_dimer(0.5, 1)"]);
    let values: Vec<f64> = stdout(&out).split_whitespace().map(|s| s.parse().unwrap()).collect();
    let expected = 0.75f64.sqrt();
    assert!((values[0] + expected).abs() < 1e-14 && (values[2] - expected).abs() < 1e-14);
    assert_eq!(values[1], 0.0);
}

#[test]
fn spectrum_reports_parse_errors_with_column() {
    let out = nhbracket(&["spectrum", "sigma_x + sigma_q"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("column 11"), "{err}");
    let out = nhbracket(&["spectrum", "sigma_x + id(3)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let a = nhbracket(&["verify", "--seed", "42", "--n", "20", "--report", report.to_str().unwrap()]);
    let b = nhbracket(&["verify", "--seed", "42", "--n", "20"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&report).unwrap(), a.stdout);
    assert!(stdout(&a).ends_with("overall PASS\n"));
    let c = nhbracket(&["verify", "--seed", "43", "--n", "20"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(nhbracket(&["verify", "--n", "3", "--tol", "1e-30"]).status.code(), Some(1));
    assert_eq!(nhbracket(&["verify", "--dims", "1"]).status.code(), Some(2));
    let out = nhbracket(&["verify", "--n", "3", "--dims", "2,3", "--hermitian-only"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("verify dims=[2, 3] n=3 seed=42 tol=1e-12 hermitian_only=true\n"));
}

#[test]
fn simulate_writes_csv_and_json_concurrently() {
    let dir = tempfile::tempdir().unwrap();
    let csv = staged(dir.path(), "pt_dimer_density.toml");
    let json = staged(dir.path(), "decay_state.toml");
    let out = nhbracket(&["simulate", csv.to_str().unwrap(), json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());

    let ts = TimeSeries::read_csv(std::fs::File::open(dir.path().join("pt_dimer_density.csv")).unwrap()).unwrap();
    assert_eq!(ts.len(), 21);
    assert_eq!(*ts.times().last().unwrap(), 2.0);
    let trace = ts.complex_column("trace").unwrap();
    assert!(trace.iter().any(|z| (z.re - 1.0).abs() > 1e-3), "broken phase gains trace");

    let ts = TimeSeries::read_json(std::fs::File::open(dir.path().join("decay_state.json")).unwrap()).unwrap();
    let norm = ts.real_column("norm").unwrap();
    assert_eq!(ts.len(), 21);
    assert!((norm[20] - (-0.1f64).exp()).abs() < 1e-12, "{}", norm[20]);
}

#[test]
fn simulate_without_output_prints_csv() {
    let out = nhbracket(&["simulate", scenario_dir().join("pt_dimer_heisenberg.toml").to_str().unwrap()]);
    assert!(out.status.success());
    let ts = TimeSeries::read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(ts.len(), 21);
    assert!(ts.complex_column("chi_exp").is_some());
}

#[test]
fn simulate_failures_exit_2() {
    let out = nhbracket(&["simulate", "does/not/exist.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}

#[test]
fn compare_pictures_matches_reference() {
    let out =
        nhbracket(&["compare-pictures", scenario_dir().join("pt_dimer_density.toml").to_str().unwrap(), "--t", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[1] - -0.5474087180995875).abs() < 1e-12);
    assert!((row[3] - 0.4093035606078238).abs() < 1e-12);
    assert!((row[5] - 0.9567122787074113).abs() < 1e-12);
}

#[test]
fn shipped_scenarios_all_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name.ends_with(".toml") {
            paths.push(staged(dir.path(), &name));
        }
    }
    assert!(paths.len() >= 5);
    let args: Vec<&str> = std::iter::once("simulate").chain(paths.iter().map(|p| p.to_str().unwrap())).collect();
    let out = nhbracket(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
