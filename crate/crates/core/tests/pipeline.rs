#![allow(clippy::needless_range_loop)]

use std::fs;
use std::path::Path;
use std::process::Command;

use koopman_legendre::cli::{self, SolveOptions};
use koopman_legendre::refinteg::rk4_integrate;
use koopman_legendre::{duffing_vector_field, parse_system_config, BasisSet, KoopmanModel, ObservableSet};
use tempfile::TempDir;

const DUFFING: &str = include_str!("../../../configs/duffing.json");
const HARMONIC: &str = include_str!("../../../configs/harmonic.json");
const ENERGY: &str = include_str!("../../../configs/energy.json");

fn with_order(json: &str, order: usize) -> String {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["order"] = order.into();
    v.to_string()
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn strip_timings(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn short_time_agreement_with_rk4() {
    for eps in [0.0, 0.005, 0.01] {
        let vf = duffing_vector_field(1.0, 1.0, 1.0, eps).unwrap();
        let model =
            KoopmanModel::build(BasisSet::new(5, 2).unwrap(), &vf, &ObservableSet::identity(&["q", "p"])).unwrap();
        let times: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
        let ko = model.solve(&[1.0, 0.0], &times).unwrap();
        let rk = rk4_integrate(&vf, &[1.0, 0.0], &times, 1e-4).unwrap();
        for (k, s) in rk.states.iter().enumerate() {
            for j in 0..2 {
                assert!((ko.values[j][k] - s[j]).abs() <= 1e-4, "eps={eps} t={}", times[k]);
            }
        }
    }
}

#[test]
fn solve_writes_trajectory_and_summary() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "duffing.json", DUFFING);
    let opts = SolveOptions {
        out_dir: dir.path().join("plain"),
        ..SolveOptions::default()
    };
    let a = cli::run_solve(&config, &opts).unwrap();
    let (header, rows) = parse_csv(&fs::read_to_string(&a.csv).unwrap());
    assert_eq!(header, ["t", "q", "p"]);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[99][0], 10.0);
    assert!(a.summary.ends_with("duffing_summary.json"));

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a.summary).unwrap()).unwrap();
    assert_eq!(summary["n"], 10);
    assert_eq!(summary["eigenvalues"].as_array().unwrap().len(), 10);
    assert!(summary["errors"].is_null());
    assert!(summary["first_box_exit_time"].is_null());
    assert!(summary["skewness"].as_f64().unwrap() > 0.0);
}

#[test]
fn reference_columns_agree_with_summary() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "duffing.json", DUFFING);
    let opts = SolveOptions {
        reference: true,
        out_dir: dir.path().to_path_buf(),
        ..SolveOptions::default()
    };
    let a = cli::run_solve(&config, &opts).unwrap();
    let (header, rows) = parse_csv(&fs::read_to_string(&a.csv).unwrap());
    assert_eq!(header, ["t", "q", "p", "q_ref", "p_ref", "q_err", "p_err"]);
    let csv_max = rows.iter().flat_map(|r| [r[5], r[6]]).fold(0.0f64, f64::max);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a.summary).unwrap()).unwrap();
    let json_max = summary["max_error"].as_f64().unwrap();
    assert!((csv_max - json_max).abs() <= 1e-15);
    assert!(json_max <= 1e-2);
    for r in &rows {
        assert_eq!(r[5], (r[1] - r[3]).abs());
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "energy.json", ENERGY);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let opts = SolveOptions {
            reference: true,
            out_dir: dir.path().join(format!("run{run}")),
            ..SolveOptions::default()
        };
        let a = cli::run_solve(&config, &opts).unwrap();
        outputs.push((fs::read(&a.csv).unwrap(), fs::read_to_string(&a.summary).unwrap()));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(strip_timings(&outputs[0].1), strip_timings(&outputs[1].1));
}

#[test]
fn custom_observables_in_scaled_domain() {
    let spec = parse_system_config(ENERGY).unwrap();
    let reference = cli::reference_trajectory(&spec, 1e-4).unwrap();
    let sol = cli::solve_system(&spec, Some(&reference)).unwrap();
    assert_eq!(sol.names, ["q", "energy"]);
    let errors = sol.summary.errors.unwrap();
    // energy is conserved exactly by the flow and nearly so by the model
    assert!(errors[1].max_abs < 1e-10, "{errors:?}");
    assert!(errors[0].max_abs < 1e-2, "{errors:?}");
    assert!(sol.summary.first_box_exit_time.is_none());
}

#[test]
fn box_exit_is_reported() {
    let mut v: serde_json::Value = serde_json::from_str(HARMONIC).unwrap();
    v["initial_state"] = serde_json::json!([0.9, 0.0]);
    v["domain"]["half_width"] = serde_json::json!([1.0, 0.5]);
    let spec = parse_system_config(&v.to_string()).unwrap();
    let sol = cli::solve_system(&spec, None).unwrap();
    let t = sol.summary.first_box_exit_time.unwrap();
    // |p| = 0.9 |sin t| first exceeds 0.5 near t = asin(5/9)
    assert!(t > 0.5 && t < 0.8, "{t}");
    assert_eq!(sol.summary.warnings.len(), 1);
}

#[test]
fn order_zero_with_identity_observables_is_rejected() {
    let err = parse_system_config(&with_order(DUFFING, 0)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn single_order_sweep_matches_solve() {
    let spec = parse_system_config(DUFFING).unwrap();
    let report = cli::sweep_orders(&spec, &[3], 1e-4).unwrap();
    let reference = cli::reference_trajectory(&spec, 1e-4).unwrap();
    let sol = cli::solve_system(&spec, Some(&reference)).unwrap();
    let row = report.rows[0].outcome.as_ref().unwrap();
    assert_eq!(Some(row.max_error), sol.summary.max_error);
    assert_eq!(&row.errors, sol.summary.errors.as_ref().unwrap());
}

#[test]
fn linear_sweep_is_exact_and_failures_are_recorded() {
    let spec = parse_system_config(HARMONIC).unwrap();
    let report = cli::sweep_orders(&spec, &[0, 1, 2, 3, 4, 5, 6], 1e-4).unwrap();
    assert_eq!(report.rows.len(), 7);
    assert!(report.rows[0].outcome.is_err());
    for r in &report.rows[1..] {
        assert!(r.outcome.as_ref().unwrap().max_error <= 1e-7, "order {}", r.order);
    }
    let csv = report.to_csv();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,1,failed"));
    assert!(report.to_table().contains("failed"));
}

fn koopman(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_koopman")).args(args).output().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let ok = write_config(dir.path(), "duffing.json", DUFFING);
    let r = koopman(&[
        "solve",
        "--config",
        ok.to_str().unwrap(),
        "--reference",
        "--out-dir",
        out,
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(Path::new(out).join("duffing_trajectory.csv").exists());

    let r = koopman(&[
        "sweep",
        "--config",
        ok.to_str().unwrap(),
        "--orders",
        "1,3",
        "--out-dir",
        out,
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(Path::new(out).join("duffing_sweep.csv").exists());

    let bad = write_config(
        dir.path(),
        "bad.json",
        &DUFFING.replace(r#""exp": [0, 1]"#, r#""exp": [0, -1]"#),
    );
    let r = koopman(&["solve", "--config", bad.to_str().unwrap(), "--out-dir", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("dynamics[0].terms[0].exp"));

    let r = koopman(&["solve", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));

    // q' = p, p' = 0 has a single Jordan block
    let jordan = write_config(
        dir.path(),
        "jordan.json",
        &with_order(
            &HARMONIC.replace(r#"{"coef": -1.0, "exp": [1, 0]}"#, r#"{"coef": 0.0, "exp": [1, 0]}"#),
            1,
        ),
    );
    let r = koopman(&["solve", "--config", jordan.to_str().unwrap(), "--out-dir", out]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));

    let blowup = write_config(
        dir.path(),
        "blowup.json",
        &HARMONIC.replace(r#"{"coef": 1.0, "exp": [0, 1]}"#, r#"{"coef": 100.0, "exp": [1, 0]}"#),
    );
    let r = koopman(&["solve", "--config", blowup.to_str().unwrap(), "--out-dir", out]);
    assert_eq!(r.status.code(), Some(4), "{}", String::from_utf8_lossy(&r.stderr));

    let r = koopman(&["validate"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&r.stdout)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        6
    );
}
