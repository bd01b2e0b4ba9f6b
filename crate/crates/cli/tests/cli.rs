use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use corrflux::qubit_example::{ExampleParams, ExampleRates};
use corrflux_cli::commands::simulate;
use corrflux_cli::records::{from_json, to_json, CSV_HEADER};
use corrflux_cli::scenario;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_corrflux"));
    cmd.env_remove("CORRFLUX_SEED");
    cmd
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn example_value() -> Value {
    serde_json::from_str(&fs::read_to_string(scenario_path("two_qubit_example.json")).unwrap()).unwrap()
}

fn write_value(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn run_to(path: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(path).arg("--output").arg(out).args(extra).output().unwrap()
}

fn lambda() -> f64 {
    ExampleRates::of(&ExampleParams::default()).lambda()
}

const U_CHI: usize = 5;

#[test]
fn zero_horizon_gives_a_single_initial_row() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["integration"]["t_final"] = 0.0.into();
    let path = write_value(&dir, "s.json", &v);
    let out = dir.path().join("out.csv");
    let o = run_to(&path, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][U_CHI] - 4.0 * 0.2 * 0.02).abs() < 1e-15);
}

#[test]
fn zero_dt_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["integration"]["dt"] = 0.0.into();
    let path = write_value(&dir, "s.json", &v);
    let o = run_to(&path, &dir.path().join("out.csv"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dt"));
}

#[test]
fn long_run_releases_the_correlation_energy() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["integration"]["t_final"] = (12.0 / lambda()).into();
    v["integration"]["record_every"] = 500.into();
    let path = write_value(&dir, "s.json", &v);
    let out = dir.path().join("out.csv");
    assert_eq!(run_to(&path, &out, &[]).status.code(), Some(0));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!(last[U_CHI].abs() < 1e-6);
    assert!((last[U_CHI] - first[U_CHI] + 4.0 * 0.2 * 0.02).abs() < 1e-6);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = scenario_path("two_qubit_example.json");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(run_to(&path, &a, &[]).status.code(), Some(0));
    assert_eq!(run_to(&path, &b, &[]).status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn json_output_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let path = scenario_path("dephasing.json");
    let out = dir.path().join("out.json");
    assert_eq!(run_to(&path, &out, &["--format", "json"]).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let parsed = from_json(&text).unwrap();
    let in_memory = simulate(&scenario::load(&path).unwrap().prepare().unwrap()).unwrap().records;
    assert_eq!(parsed, in_memory);
    assert_eq!(to_json(&parsed).unwrap(), text);
}

#[test]
fn malformed_scenario_reports_position() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"shape\": {\"dA\": 2, \"dB\": 2},\n  \"H_A\": [[1.0, 0.0],\n}\n").unwrap();
    let o = run_to(&path, &dir.path().join("out.csv"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let mut v = example_value();
    v["integration"].as_object_mut().unwrap().remove("dt");
    let path = write_value(&dir, "missing.json", &v);
    let o = run_to(&path, &dir.path().join("out.csv"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dt"));
}

#[test]
fn out_of_range_correlation_cites_bounds() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["initial_state"]["c"] = 0.2.into();
    let path = write_value(&dir, "s.json", &v);
    let o = run_to(&path, &dir.path().join("out.csv"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0.2") && err.contains("0.0871"), "{err}");
}

#[test]
fn diagnostic_breach_exits_2_and_still_writes() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["integration"] = serde_json::json!({"t_final": 5.0, "dt": 1.0, "record_every": 1});
    let path = write_value(&dir, "s.json", &v);
    let out = dir.path().join("out.csv");
    assert_eq!(run_to(&path, &out, &[]).status.code(), Some(2));
    assert_eq!(csv_rows(&fs::read_to_string(&out).unwrap()).len(), 6);
}

fn sweep(path: &Path, dir: &Path, param: &str, min: f64, max: f64, steps: usize) -> Output {
    bin()
        .arg("sweep")
        .arg(path)
        .args(["--param", param, "--min", &min.to_string(), "--max", &max.to_string()])
        .args(["--steps", &steps.to_string()])
        .arg("--output-dir")
        .arg(dir)
        .output()
        .unwrap()
}

fn summary(dir: &Path, tag: &str) -> Vec<(f64, f64, i32)> {
    let text = fs::read_to_string(dir.join(format!("sweep_{tag}_summary.csv"))).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,DeltaU_chi_final,sign"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn sweep_over_c_flips_sign_at_zero() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["V"]["g"] = 0.5.into();
    let path = write_value(&dir, "s.json", &v);
    let out = dir.path().join("out");
    assert_eq!(sweep(&path, &out, "c", -0.01, 0.01, 9).status.code(), Some(0));
    let rows = summary(&out, "c");
    let signs: Vec<i32> = rows.iter().map(|r| r.2).collect();
    assert_eq!(signs, [1, 1, 1, 1, 0, -1, -1, -1, -1]);
    for i in 0..9 {
        assert!(out.join(format!("sweep_c_{i}.csv")).exists());
    }
}

#[test]
fn sweep_over_g_is_linear() {
    let dir = TempDir::new().unwrap();
    let mut v = example_value();
    v["integration"] = serde_json::json!({"t_final": 12.0 / lambda(), "dt": 1e-3, "record_every": 1000});
    let path = write_value(&dir, "s.json", &v);
    let out = dir.path().join("out");
    assert_eq!(sweep(&path, &out, "g", -0.2, 0.2, 5).status.code(), Some(0));
    let rows = summary(&out, "g");
    let c = 0.02;
    assert!((rows[0].1 - 4.0 * 0.2 * c).abs() < 1e-6);
    assert!((rows[4].1 + 4.0 * 0.2 * c).abs() < 1e-6);
    let slope = rows[4].1 / rows[4].0;
    for (g, delta, _) in &rows {
        assert!((delta - slope * g).abs() < 1e-12);
    }
}

#[test]
fn single_point_sweep_matches_run() {
    let dir = TempDir::new().unwrap();
    let path = scenario_path("two_qubit_example.json");
    let out = dir.path().join("out");
    assert_eq!(sweep(&path, &out, "/initial_state/c", -0.01, -0.01, 1).status.code(), Some(0));
    let mut v = example_value();
    v["initial_state"]["c"] = (-0.01).into();
    let single = write_value(&dir, "s.json", &v);
    let run_out = dir.path().join("run.csv");
    assert_eq!(run_to(&single, &run_out, &[]).status.code(), Some(0));
    assert_eq!(fs::read(out.join("sweep_initial_state_c_0.csv")).unwrap(), fs::read(run_out).unwrap());
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let dir = TempDir::new().unwrap();
    let path = scenario_path("two_qubit_example.json");
    assert_eq!(sweep(&path, dir.path(), "/nope/x", 0.0, 1.0, 3).status.code(), Some(1));
    assert_eq!(sweep(&path, dir.path(), "temperature", 0.0, 1.0, 3).status.code(), Some(1));
}

fn check(name: &str, seed_env: Option<&str>) -> Value {
    let mut cmd = bin();
    cmd.arg("check-conditions").arg(scenario_path(name)).args(["--samples", "25", "--seed", "3"]);
    if let Some(s) = seed_env {
        cmd.env("CORRFLUX_SEED", s);
    }
    let o = cmd.output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn condition_reports() {
    let ex = check("two_qubit_example.json", None);
    assert_eq!(ex["commutator_residual"], 0.0);
    assert!(ex["adjoint_residual"].as_f64().unwrap() > 0.0);
    assert_eq!(ex["condition_ii"], false);
    assert_eq!(ex["seed"], 3);
    assert_eq!(ex["samples"], 25);

    let deph = check("dephasing.json", None);
    assert!(deph["commutator_residual"].as_f64().unwrap() <= 1e-12);
    assert!(deph["adjoint_residual"].as_f64().unwrap() <= 1e-12);

    let empty = check("uncoupled_closed.json", None);
    assert_eq!(empty["commutator_residual"], 0.0);
    assert_eq!(empty["adjoint_residual"], 0.0);

    assert_eq!(check("two_qubit_example.json", Some("42"))["seed"], 42);
}

#[test]
fn example_subcommand_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex.csv");
    let o = bin()
        .args(["example", "--g", "0.5", "--c", "-0.01", "--t-final", "1", "--dt", "0.001", "--record-every", "100"])
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 11);
    let p = ExampleParams { g: 0.5, c: -0.01, ..Default::default() };
    for r in &rows {
        let expected = 4.0 * p.g * p.c * (-lambda() * r[0]).exp();
        assert!((r[U_CHI] - expected).abs() < 1e-9);
    }
    let o = bin().args(["example", "--c", "0.5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
