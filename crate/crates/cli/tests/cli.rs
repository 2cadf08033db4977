use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isochron")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn design(dir: &Path, targets: &[&str]) -> String {
    let out = dir.join("w.json");
    let mut args = vec!["design"];
    args.extend_from_slice(targets);
    args.extend_from_slice(&["-o", out.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

#[test]
fn design_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let w = design(dir.path(), &["0.5"]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w).unwrap()).unwrap();
    assert_eq!(v["sweep_zeros"].as_array().unwrap().len(), 1);
    assert_eq!(v["coefficients"].as_object().unwrap().len(), 20);
    let dup = run(&["design", "0.5", "0.5"]);
    assert_eq!(code(&dup), 2);
    assert!(String::from_utf8_lossy(&dup.stderr).contains("duplicate"));
    assert_eq!(code(&run(&["design", "1.5"])), 2);
    assert_eq!(code(&run(&["design"])), 2);
}

#[test]
fn simulate_missing_file_is_usage_error() {
    assert_eq!(code(&run(&["simulate", "/nonexistent/witness.json"])), 2);
    assert_eq!(code(&run(&["simulate"])), 2);
}

#[test]
fn simulate_at_zero_eps() {
    let dir = tempfile::tempdir().unwrap();
    let w = design(dir.path(), &["0.3", "0.7"]);
    let csv = dir.path().join("sweep.csv");
    let js = dir.path().join("sim.json");
    let o = run(&["simulate", &w, "--eps", "0", "--scan", "11", "--sweep-csv", csv.to_str().unwrap(), "--json", js.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r0,dr"));
    for l in lines {
        let dr: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!(dr.abs() < 1e-10, "{l}");
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(js).unwrap()).unwrap();
    assert!(v["runs"][0]["fixed_points"].as_array().unwrap().is_empty());
    assert_eq!(code(&run(&["simulate", &w, "--eps", "0.5"])), 2);
}

#[test]
fn verify_tamper_fails() {
    let dir = tempfile::tempdir().unwrap();
    let js = dir.path().join("report.json");
    let o = run(&["verify", "--grid", "200", "--tamper", "z52", "--json", js.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(js).unwrap()).unwrap();
    assert_eq!(v["overall"], "fail");
    for c in v["checks"].as_array().unwrap() {
        for key in ["name", "method", "verdict", "margin", "seconds"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
    assert_eq!(code(&run(&["verify", "--grid", "2"])), 2);
}

#[test]
fn series_and_export() {
    let o = run(&["series", "--order", "6"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("-685/7516192768*pi^2") && s.contains("-1/8*pi"));
    let dir = tempfile::tempdir().unwrap();
    let w = design(dir.path(), &["0.4"]);
    let out = dir.path().join("plots");
    let o = run(&["export", &w, "--out", out.to_str().unwrap(), "--points", "12"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for (f, head) in [("averaged.csv", "r,f,G"), ("sweep.csv", "r0,dr"), ("trajectory.csv", "t,x,y,zone")] {
        let t = std::fs::read_to_string(out.join(f)).unwrap();
        assert_eq!(t.lines().next(), Some(head));
    }
}
