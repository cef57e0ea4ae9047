use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_green-teich"));
    c.env_remove("GREEN_TEICH_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn green_examples() {
    let out = run(&["green", "--domain", "disc", "--x", "0", "--y", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "green");
    assert_eq!(v["results"]["method"], "oracle");
    assert!((v["results"]["value"].as_f64().unwrap() - (-0.693147)).abs() < 1e-6);

    let out = run(&["green", "--domain", "ball2", "--x", "0,0", "--y", "0.5,0", "--estimate"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["method"], "estimator");
    assert!((v["results"]["value"].as_f64().unwrap() + 2f64.ln()).abs() < 1e-4);
    assert!(v["results"]["witness"].is_object());

    assert_eq!(run(&["green", "--domain", "disc", "--x", "2", "--y", "0"]).status.code(), Some(3));
}

#[test]
fn teich_examples() {
    let v = json(&run(&["teich", "--tau1", "i", "--tau2", "2i"]));
    let r = &v["results"];
    assert!((r["k"].as_f64().unwrap() - 0.333333).abs() < 1e-6);
    assert!((r["d"].as_f64().unwrap() - 0.346574).abs() < 1e-6);
    assert!((r["g"].as_f64().unwrap() + 1.098612).abs() < 1e-6);

    let v = json(&run(&["teich", "--tau1", "i", "--tau2", "i"]));
    assert_eq!(v["results"]["g"], "-inf");
    assert_eq!(v["results"]["k"].as_f64(), Some(0.0));

    let a = json(&run(&["teich", "--tau1", "1+i", "--tau2", "i"]));
    let b = json(&run(&["teich", "--tau1", "i", "--tau2", "1+i"]));
    for key in ["k", "d", "g"] {
        assert_eq!(a["results"][key], b["results"][key]);
    }
    assert_eq!(run(&["teich", "--tau1", "-2i", "--tau2", "i"]).status.code(), Some(3));
}

#[test]
fn extremal_examples() {
    let v = json(&run(&["extremal", "--torus", "--mu", "0.3"]));
    assert_eq!(v["results"]["verdict"], "extremal");
    assert!((v["results"]["hk_value"].as_f64().unwrap() - 0.3).abs() < 1e-12);

    let v = json(&run(&["extremal", "--torus", "--mu", "0"]));
    assert_eq!(v["results"]["verdict"], "extremal");
    assert_eq!(v["results"]["hk_value"].as_f64(), Some(0.0));

    let out = run(&["extremal", "--disc", "--pattern", "angular4", "--k", "0.4", "--degree", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["verdict"], "not_extremal");
    assert_eq!(v["results"]["provisional"], true);

    assert_eq!(run(&["extremal", "--torus", "--mu", "1"]).status.code(), Some(3));
}

#[test]
fn verify_exit_codes_and_lines() {
    let out = run(&["verify", "eq2", "--n", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.lines().any(|l| l == "PASS eq2/log_k_equals_half_plane_green"));
    let v = json(&out);
    assert!(v["worst_case"]["eq2"]["max_half_plane_discrepancy"].as_f64().unwrap() <= 1e-12);

    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "eq2", "--set", "rungs=1"]).status.code(), Some(2));
    // an impossible tolerance makes the suite fail honestly
    assert_eq!(run(&["verify", "eq2", "--set", "tol.eq2_half_plane=1e-300"]).status.code(), Some(1));
}

#[test]
fn metric_commands() {
    let v = json(&run(&["azukawa", "--domain", "disc", "--x", "0.5", "--xi", "1"]));
    assert!((v["results"]["value"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6);
    let v = json(&run(&["kobayashi", "--torus", "--x", "0.5+1.5i", "--xi", "1"]));
    let r = &v["results"];
    assert!((r["value"].as_f64().unwrap() - r["finsler"].as_f64().unwrap()).abs() < 5e-3);
    let out = run(&["azukawa", "--domain", "disc", "--x", "0.995", "--xi", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn smoothness_and_disc_search() {
    let v = json(&run(&["smoothness-probe", "--tau1", "0.3+1.2i", "--tau2", "i", "--rungs", "4"]));
    assert_eq!(v["results"]["rungs"].as_array().unwrap().len(), 4);
    let out = run(&["--set", "max_degree=2", "disc-search", "--domain", "disc", "--x", "0.1", "--y", "-0.4i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["results"]["gap"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn deterministic_payloads() {
    for args in [
        &["verify", "lemma2", "--seed", "3"][..],
        &["verify", "psh", "--n", "20", "--seed", "5"][..],
        &["green", "--domain", "ball2", "--x", "0.1,0.2", "--y", "-0.3,0", "--estimate", "--set", "max_degree=2"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn config_layers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# test config\nseed = 9\nformat = csv\nmax_degree = 2\n").unwrap();
    let out = bin().env("GREEN_TEICH_CONFIG", &path).args(["teich", "--tau1", "i", "--tau2", "2i"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("config_echo.run.seed,9\n"));

    let out = bin()
        .env("GREEN_TEICH_CONFIG", &path)
        .args(["--format", "json", "--seed", "4", "--set", "max_degree=3", "teich", "--tau1", "i", "--tau2", "2i"])
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["config_echo"]["run"]["seed"], 4);
    assert_eq!(v["config_echo"]["run"]["search"]["max_degree"], 3);

    std::fs::write(&path, "colour = red\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "teich", "--tau1", "i", "--tau2", "i"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--config", "/nonexistent/file", "teich", "--tau1", "i", "--tau2", "i"]);
    assert_eq!(out.status.code(), Some(2));
}
