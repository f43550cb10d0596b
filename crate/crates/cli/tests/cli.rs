use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn phasemax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasemax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn generate(dir: &Path, n: usize, m: usize, beta: f64) -> String {
    let path = dir.join(format!("inst_{n}_{m}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = phasemax(&[
        "generate", "--n", &n.to_string(), "--m", &m.to_string(),
        "--beta-deg", &beta.to_string(), "--seed", "11", "--out", &p,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn recover_reports_result_fields() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), 6, 60, 25.0);
    for method in ["phasemax", "bp", "gs"] {
        let out = phasemax(&["recover", "--instance", &inst, "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let v = json(&out);
        for key in ["x_star", "iterations", "max_constraint_violation", "objective", "rre", "success", "converged", "wall_ms"] {
            assert!(v.get(key).is_some(), "{method}: missing {key}");
        }
        assert_eq!(v["method"], method);
        assert_eq!(v["success"], true, "{method}: rre {}", v["rre"]);
    }
}

#[test]
fn recover_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), 4, 40, 10.0);
    let out_path = dir.path().join("res.json");
    let out = phasemax(&["recover", "--instance", &inst, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(v["x_star"]["entries"].as_array().map(Vec::len), Some(4));
}

#[test]
fn sweep_csv_has_fixed_header() {
    let out = phasemax(&[
        "sweep", "--n", "4", "--beta-deg", "20,40", "--m-grid", "16:32:16", "--trials", "3", "--seed", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("beta_deg,m,trials,successes,rate,wilson_lo,wilson_hi,theory_bound")
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_config_file_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"n": 3, "beta_deg": [30], "m_grid": "12", "trials": 2}"#).unwrap();
    let csv = dir.path().join("out.csv");
    let out = phasemax(&["sweep", "--config", good.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "m_grid": "12", "colour": 1}"#).unwrap();
    let out = phasemax(&["sweep", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_formulas() {
    let v = json(&phasemax(&["bounds", "--formula", "thm1", "--params", "m=400,n=50,beta_deg=30"]));
    assert_eq!(v["valid"], true);
    let p = v["value"].as_f64().unwrap();
    assert!(p > 0.99 && p < 1.0);

    // below the 4n threshold the bound is vacuous
    let v = json(&phasemax(&["bounds", "--formula", "thm1", "--params", "m=100,n=50,alpha=0.5"]));
    assert_eq!(v["value"].as_f64(), Some(0.0));

    let out = phasemax(&["bounds", "--formula", "lem4", "--params", "m=20,n=10,phi=0.3"]);
    assert!(out.status.success());
    assert!(json(&out).get("trace").is_some());
}

#[test]
fn oracle_subcommands() {
    let v = json(&phasemax(&["oracle", "regions", "--n", "2", "--k", "3", "--samples", "20000"]));
    assert_eq!(v["brute_force"].as_u64(), Some(6), "{v}");
    assert_eq!(v["match"], true);

    let v = json(&phasemax(&["oracle", "cover", "--n", "2", "--m", "3", "--trials", "4000", "--seed", "5"]));
    let f = v["frequency"].as_f64().unwrap();
    assert!((f - 0.25).abs() < 0.04, "{f}");

    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), 5, 60, 20.0);
    let out = phasemax(&["oracle", "unique", "--instance", &inst]);
    assert!(out.status.success());
    assert!(json(&out).to_string().contains("true"));
}

#[test]
fn exit_codes() {
    // config errors
    assert_eq!(phasemax(&["bounds", "--formula", "thm1", "--params", "n=5"]).status.code(), Some(2));
    assert_eq!(phasemax(&["bounds", "--formula", "nope"]).status.code(), Some(2));
    assert_eq!(
        phasemax(&["sweep", "--n", "4", "--m-grid", "9:3:1", "--beta-deg", "10"]).status.code(),
        Some(2)
    );
    // I/O errors
    assert_eq!(
        phasemax(&["recover", "--instance", "/nonexistent/instance.json"]).status.code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    let code = phasemax(&["recover", "--instance", garbage.to_str().unwrap()]).status.code();
    assert_eq!(code, Some(2));
}
