use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn boojum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boojum")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn obs_file(lines: &[&str]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
    f
}

#[test]
fn check_exit_codes() {
    let out = boojum(&["check", "-m", "-1", "-r", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["reason"], "ShapeAtOrBelowMinusOne");
    assert_eq!(json(&out)["proper"], false);

    let out = boojum(&["check", "-m", "0.5", "-r", "2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let t = json(&out)["t_value"].as_f64().unwrap();
    assert!((t - 2.0 * (-4f64).exp()).abs() < 1e-15);

    let out = boojum(&["check", "-m", "0.5", "-r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["proper"], true);

    assert_eq!(boojum(&["check", "-m", "abc", "-r", "1"]).status.code(), Some(1));
    assert_eq!(boojum(&["check", "-r", "1,1"]).status.code(), Some(1));
}

#[test]
fn logz_output() {
    let out = boojum(&["logz", "-m", "0", "-r", "2,5", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["log_z"].as_f64().unwrap() + 10f64.ln()).abs() < 0.05);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["config"]["grid_n"], 500);
    assert_eq!(v["config"]["samples_p"], 2000);
    assert_eq!(v["config"]["rho"], 1.0);
    assert_eq!(boojum(&["logz", "-m", "0", "-r", "2,5", "--seed", "42"]).stdout, out.stdout);

    let out = boojum(&["logz", "-m", "2", "-r", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains(">= 1"), "{msg}");
}

#[test]
fn posterior_from_file() {
    let f = obs_file(&[r#"{"y": [0.5, 0.5]}"#]);
    let out = boojum(&["posterior", "--prior-m", "0", "--prior-r", "1,1", "--obs", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["m"], 1.0);
    for rk in v["r"].as_array().unwrap() {
        assert!((rk.as_f64().unwrap() - (1.0 + 2f64.ln())).abs() < 1e-12);
    }
    assert_eq!(v["proper"], true);

    let empty = obs_file(&[]);
    let out = boojum(&["posterior", "--prior-m", "0.5", "--prior-r", "2,3", "--obs", empty.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["m"], 0.5);
    assert_eq!(v["r"], serde_json::json!([2.0, 3.0]));

    let zero = obs_file(&[r#"{"y": [1.0, 0.0]}"#]);
    let out = boojum(&["posterior", "--prior-m", "0", "--prior-r", "1,1", "--obs", zero.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("zero component at line 1"));

    let bad = obs_file(&[r#"{"y": [0.5, 0.5]}"#, "not json"]);
    let out = boojum(&["posterior", "--prior-m", "0", "--prior-r", "1,1", "--obs", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));

    let missing = boojum(&["posterior", "--prior-m", "0", "--prior-r", "1,1", "--obs", "/nonexistent/obs.jsonl"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn mean_and_moment() {
    let out = boojum(&["mean", "-m", "0", "-r", "2,5", "--samples", "20000", "--grid-n", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let mean: Vec<f64> = serde_json::from_value(json(&out)["mean"].clone()).unwrap();
    assert!((mean[0] - 0.5).abs() < 0.02 && (mean[1] - 0.2).abs() < 0.02, "{mean:?}");

    let out = boojum(&["moment", "--order", "1,1", "-m", "0", "-r", "2,5", "--samples", "20000", "--grid-n", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["moment"].as_f64().unwrap() - 0.1).abs() < 0.02);

    let out = boojum(&["moment", "--order", "3,0", "-m", "0", "-r", "2,5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("order above 2 unsupported"));

    assert_eq!(boojum(&["mean", "-m", "2", "-r", "1,1"]).status.code(), Some(2));
}

#[test]
fn region_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("panel.csv");
    let out = boojum(&["region", "--m", "1", "--r1", "0.01,3", "--r2", "0.01,3", "--steps", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 49);
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (r1, r2): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        let proper = (-r1).exp() + (-r2).exp() < 1.0;
        assert_eq!(cols[2], if proper { "1" } else { "0" }, "{line}");
        let t: f64 = cols[3].parse().unwrap();
        assert!((t - (-r1).exp() - (-r2).exp()).abs() < 1e-15);
    }

    let out = boojum(&["region", "--m", "1", "--r1", "0.01,3", "--r2", "0.01,3", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}
