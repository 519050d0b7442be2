use std::fs;
use std::process::{Command, Output};

use padic_attractor::padic::FieldParams;
use padic_attractor::symbolic::tube_radii;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-attractor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn decode_zero_window() {
    let o = bin(&["decode", "--window", "0.0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["x"]["digits"], Value::Array(vec![]));
    assert_eq!(v["y"]["digits"], Value::Array(vec![]));
    let fp = FieldParams::canonical();
    let (delta0, _) = tube_radii(&fp, 0, 0);
    let (_, eps1) = tube_radii(&fp, 1, 0);
    assert_eq!(v["radius"], delta0.max(eps1).to_string());
}

#[test]
fn decode_encode_agree() {
    let o = bin(&["decode", "--window", "21.0102", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let (x, y) = (row[1], row[2]);
    assert!(x.starts_with('…'));
    let e = bin(&["encode", "--x", x, "--y", y, "--back", "2", "--fwd", "3"]);
    assert!(e.status.success(), "{}", stderr(&e));
    let v: Value = serde_json::from_str(&stdout(&e)).unwrap();
    assert_eq!(v["window"], "21.0102");
}

#[test]
fn check_conjugacy_sweep() {
    let o = bin(&["check-conjugacy", "--windows", "500", "--depth", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 501);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true,true")));
}

#[test]
fn dimension_slope() {
    let o = bin(&["dimension", "--depths", "1..4", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // the slope over these radii is 7/5, on the edge of the band
    let est = v["estimate"].as_f64().unwrap();
    assert!((est - 1.4).abs() < 1e-12, "{est}");
    assert!((est - 1.5).abs() <= 0.1 + 1e-12, "{est}");
    let counts: Vec<u64> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![9, 27, 243, 729]);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["equidistribution", "--length", "3000", "--starts", "2"],
        vec!["embed", "--windows", "40"],
        vec!["embed", "--windows", "40", "--format", "svg"],
        vec!["check-conjugacy", "--windows", "20", "--depth", "3", "--format", "json"],
    ] {
        let mut bodies = Vec::new();
        for i in 0..2 {
            let path = dir.path().join(format!("out{i}"));
            let mut full = args.clone();
            full.extend(["--seed", "11", "--out", path.to_str().unwrap()]);
            let o = bin(&full);
            assert!(o.status.success(), "{args:?}: {}", stderr(&o));
            bodies.push(fs::read(&path).unwrap());
        }
        assert!(!bodies[0].is_empty());
        assert_eq!(bodies[0], bodies[1], "{args:?}");
    }
    let a = bin(&["embed", "--windows", "10", "--seed", "1"]);
    let b = bin(&["embed", "--windows", "10", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "a = 9\nb = \"1/3\"\n\n[dimension]\ndepths = \"1..3\"\n").unwrap();
    let o = bin(&["dimension", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["theoretical"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);

    let o = bin(&[
        "dimension",
        "--config",
        path.to_str().unwrap(),
        "--a",
        "3",
        "--depths",
        "2..4",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theoretical"], 1.5);
    let counts: Vec<u64> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, vec![27, 243, 729]);
}

#[test]
fn invalid_parameters_cite_the_constraint() {
    let o = bin(&["--a", "1/3", "decode", "--window", "0.0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("0 < |a| < 1"), "{}", stderr(&o));
    let o = bin(&["--b", "9", "decode", "--window", "0.0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("|b| = q"), "{}", stderr(&o));
    let o = bin(&["--p", "4", "decode", "--window", "0.0"]);
    assert!(stderr(&o).contains("not prime"));
}

#[test]
fn module_errors_surface() {
    let o = bin(&["orbit", "--x", "1", "--y", "0", "--backward", "--steps", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("leaves the unit polydisc at step 1"));
    let o = bin(&["decode", "--window", "0.0", "--format", "svg"]);
    assert!(!o.status.success());
    let o = bin(&["decode", "--window", "0.3"]);
    assert!(stderr(&o).contains("out of range"), "{}", stderr(&o));
}

#[test]
fn orbit_dump_is_json_lines() {
    let o = bin(&["orbit", "--x", "2", "--y", "1", "--steps", "5"]);
    assert!(o.status.success());
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l["k"], k as i64);
        assert_eq!(l["precision"], 64 - k as i64);
    }
}

#[test]
fn embed_points_lie_in_the_unit_square() {
    let o = bin(&["embed", "--windows", "30", "--digits", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for line in out.lines().skip(1) {
        let f: Vec<f64> = line.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        assert!(f.iter().all(|&t| (0.0..1.0).contains(&t)));
        // multiples of 3^-4
        assert!(f.iter().all(|&t| ((t * 81.0) - (t * 81.0).round()).abs() < 1e-9));
    }
}
