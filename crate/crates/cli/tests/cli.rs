use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchfn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn spec(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn trivial_examples() {
    let v = json(&["evenpoly", "-n", "1", "--lambda=0"]);
    assert!((floats(&v["points"])[0] - 0.5).abs() < 1e-12);
    let v = json(&["sine", "-n", "1", "--lambda", "0"]);
    assert!((floats(&v["points"])[0] - 2.0 / 3.0).abs() < 1e-10);
    let v = json(&["poly", "-n", "1", "--lambda", "0"]);
    assert!((floats(&v["points"])[0] - 0.5).abs() < 1e-12);
}

#[test]
fn theta_and_lambda_flags() {
    // n = 4: λ = (-1)^(n-1) (2θ - 1).
    let a = json(&["poly", "-n", "4", "--theta", "0.3"]);
    let b = json(&["poly", "-n", "4", "--lambda", "0.4"]);
    for (x, y) in floats(&a["points"]).iter().zip(floats(&b["points"])) {
        assert!((x - y).abs() < 1e-14);
    }
    let both = run(&["poly", "-n", "4", "--lambda", "0.1", "--theta", "0.9"]);
    assert_eq!(both.status.code(), Some(0));
    assert!(stderr(&both).contains("using --lambda"));
    assert_eq!(stdout(&both), stdout(&run(&["poly", "-n", "4", "--lambda", "0.1"])));
}

#[test]
fn evenpoly_certifies_residual() {
    let v = json(&["evenpoly", "-n", "3", "--lambda", "0.4"]);
    assert!(v["max_abs"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["system"], "odd");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["poly", "-n", "3"],
        vec!["poly", "-n", "0", "--lambda", "0"],
        vec!["poly", "-n", "3", "--lambda", "1.5"],
        vec!["det", "X", "-n", "3"],
        vec!["det", "K", "-n", "3"],
        vec!["det", "A"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn unknown_spec_tag_lists_vocabulary() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "bad.toml", "f1 = \"tan(1)\"\n");
    let out = run(&["generic", "--spec", s(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("vocabulary"));
    assert!(stderr(&out).contains("exp(a)"));
}

#[test]
fn boundary_lambda_gives_constant() {
    let out = run(&["--format", "json", "poly", "-n", "3", "--lambda=-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("constant"));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["initial_sign"], -1.0);
    assert!(floats(&v["points"]).is_empty());
    assert_eq!(v["max_abs"], 0.0);
}

#[test]
fn cos_sin_solution() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "cs.toml", "c = \"cos(1, 1)\"\ns = \"sin(1, 1)\"\n");
    let v = json(&["generic", "--spec", s(&p), "--lambda", "0"]);
    let x = floats(&v["points"]);
    assert_eq!(v["status"], "Converged");
    assert!((x[0] - 1.0 / 3.0).abs() < 1e-9 && (x[1] - 2.0 / 3.0).abs() < 1e-9, "{x:?}");
    // Pairing by hand: sin(πt)/π and (1 - cos πt)/π over [0,x1), [x1,x2), [x2,1].
    let f = |t: f64| (PI * t).sin() / PI;
    let g = |t: f64| (1.0 - (PI * t).cos()) / PI;
    for h in [f, g] {
        let pair = h(x[0]) - (h(x[1]) - h(x[0])) + (h(1.0) - h(x[1]));
        assert!(pair.abs() < 1e-10);
    }
}

#[test]
fn counterexample_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "ce.toml", "f1 = \"const(1)\"\nf2 = \"cos(5*pi/2, 5/2)\"\n");
    let out = run(&["--format", "json", "generic", "--spec", s(&p), "--lambda=-0.6"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "NoConvergence");
    assert!(v["best_residual"].as_f64().unwrap() >= 0.05);
    assert_eq!(v["starts_tried"], 64);
}

#[test]
fn threads_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "f.toml", "a = \"exp(1)\"\nb = \"poly(0, 1, 1)\"\nc = \"sin(1, 0.5)\"\n");
    let one = run(&["generic", "--spec", s(&p), "--seed", "7", "--threads", "1"]);
    let four = run(&["generic", "--spec", s(&p), "--seed", "7", "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn verify_round_trips() {
    let dir = TempDir::new().unwrap();
    let cs = spec(&dir, "cs.toml", "c = \"cos(1, 1)\"\ns = \"sin(1, 1)\"\n");
    let ts = spec(&dir, "ts.toml", "p = \"exp(1)\"\nq = \"sin(1, 1)\"\n");
    let runs: Vec<Vec<&str>> = vec![
        vec!["poly", "-n", "7", "--lambda", "0.2"],
        vec!["evenpoly", "-n", "5", "--theta", "0.3333333333333333"],
        vec!["sine", "-n", "4", "--lambda=-0.5"],
        vec!["poly", "-n", "2", "--lambda", "1"],
        vec!["generic", "--spec", s(&cs)],
        vec!["twoswitch", "--spec", s(&ts), "--k", "3"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let file = dir.path().join(format!("run{i}.json"));
        let mut all = vec!["--format", "json", "--out", s(&file)];
        all.extend_from_slice(args);
        let out = run(&all);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(stdout(&out).is_empty());
        let v = json(&["verify", s(&file)]);
        assert_eq!(v["ok"], true, "{args:?}");
        assert!(v["difference"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn verify_rejects_tampered_points() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("p.json");
    let out = run(&["--format", "json", "--out", s(&file), "poly", "-n", "4", "--lambda", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    v["points"][1] = Value::from(v["points"][1].as_f64().unwrap() + 1e-6);
    std::fs::write(&file, v.to_string()).unwrap();
    let out = run(&["verify", s(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("ok: false"));
}

#[test]
fn twoswitch_linear() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "lin.toml", "one = \"const(1)\"\nt = \"poly(0, 1)\"\n");
    let v = json(&["twoswitch", "--spec", s(&p), "--k", "2"]);
    let x = floats(&v["points"]);
    assert!((x[0] - 0.25).abs() < 1e-10 && (x[1] - 0.75).abs() < 1e-10);
    let out = run(&["twoswitch", "--spec", s(&p), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn det_examples() {
    let v = json(&["det", "K", "--n", "4", "--theta", "0.5"]);
    let (f, n) = (v["formula"].as_f64().unwrap(), v["numeric"].as_f64().unwrap());
    assert!((f - n).abs() <= 1e-10 * f.abs());
    let v = json(&["det", "A", "--m", "3"]);
    assert_eq!(v["formula"], 64.0);
    assert!((v["numeric"].as_f64().unwrap() - 64.0).abs() < 1e-12);
    let v = json(&["det", "b", "-n", "2", "--theta", "0.3"]);
    assert!((v["formula"].as_f64().unwrap() - 0.3).abs() < 1e-15);
    assert!((v["numeric"].as_f64().unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn csv_layout() {
    let out = run(&["--format", "csv", "poly", "-n", "3", "--lambda", "0"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,point,residual");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,0.146446609407,"));
    assert!(!text.contains('\r'));
}

#[test]
fn psi_scan_boundaries() {
    let dir = TempDir::new().unwrap();
    let lin = spec(&dir, "lin.toml", "one = \"const(1)\"\nt = \"poly(0, 1)\"\n");
    let v = json(&["psi-scan", "--spec", s(&lin), "--grid", "20"]);
    for row in v["boundary"]["left"].as_array().unwrap() {
        let r = floats(row);
        let x = r[1];
        assert!((r[2] - (1.0 - 2.0 * x)).abs() < 1e-12);
        assert!((r[3] - (0.5 - x * x)).abs() < 1e-12);
    }
    assert_eq!(v["interior"].as_array().unwrap().len(), 231);

    let csv = stdout(&run(&["--format", "csv", "psi-scan", "--spec", s(&lin), "--grid", "4", "--lambda", "0"]));
    assert!(csv.starts_with("kind,x1,x2,psi1,psi2\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("lambda,")).count(), 5);

    let svg = stdout(&run(&["psi-scan", "--spec", s(&lin), "--svg"]));
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("viewBox=\"0 0 600 600\""));
    assert!(svg.contains("stroke-dasharray"));

    let three = spec(&dir, "three.toml", "a = \"const(1)\"\nb = \"poly(0, 1)\"\nc = \"exp(1)\"\n");
    assert_eq!(run(&["psi-scan", "--spec", s(&three)]).status.code(), Some(2));
}

#[test]
fn counterexample_target_uncovered() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "ce.toml", "f1 = \"const(1)\"\nf2 = \"cos(5*pi/2, 5/2)\"\n");
    let v = json(&["psi-scan", "--spec", s(&p), "--lambda=-0.6", "--grid", "80"]);
    let t = floats(&v["target"]);
    assert!((t[0] + 0.6).abs() < 1e-12 && (t[1] + 0.6).abs() < 1e-12);
    assert_eq!(v["target_covered"], false);
    let v = json(&["psi-scan", "--spec", s(&p), "--lambda", "0", "--grid", "80"]);
    assert_eq!(v["target_covered"], true);
}
