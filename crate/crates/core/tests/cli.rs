use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn morrey(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey")).args(args).current_dir(dir).output().expect("spawn morrey")
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join(name)).unwrap()).unwrap()
}

fn synth_ball(dir: &Path, radius: &str, out: &str) {
    let o = morrey(
        dir,
        &["synth", "--family", "ball", "--center", "0", "--radius", radius, "--grid", "1,8,4096", "-o", out],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_writes_a_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    synth_ball(dir.path(), "1", "f.mry");
    let f = morrey::grid::read_grid(dir.path().join("f.mry")).unwrap();
    assert_eq!(f.spec().cells_per_axis(), 4096);
    let mass: f64 = f.values().iter().sum::<f64>() * f.spec().cell_volume();
    assert!((mass - 2.0).abs() < 1e-12);
}

#[test]
fn sharp_vs_max_passes() {
    let dir = tempfile::tempdir().unwrap();
    synth_ball(dir.path(), "1", "f.mry");
    let o = morrey(
        dir.path(),
        &["check", "dominance", "--name", "sharp-vs-max", "-i", "f.mry", "--p", "2", "--lambda", "0.5", "-o", "r.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = json(dir.path(), "r.json");
    assert_eq!(r["pass"], true);
    assert_eq!(r["report"][0]["violation_count"], 0);
    for key in ["config", "paper_ref", "tolerances"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["config"]["params"]["lambda"], 0.5);
}

#[test]
fn tightened_constant_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    synth_ball(dir.path(), "0.1", "f.mry");
    let o = morrey(
        dir.path(),
        &["check", "dominance", "--name", "sharp-vs-max", "--constant", "1.9", "-i", "f.mry", "-o", "r.json"],
    );
    assert_eq!(o.status.code(), Some(1));
    let r = json(dir.path(), "r.json");
    assert_eq!(r["pass"], false);
    assert!(r["report"][0]["max_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn usage_errors_exit_2_with_usage_text() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["frobnicate"][..], &["norm", "-i", "f.mry", "--bogus"], &["check", "nonsense"]] {
        let o = morrey(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    synth_ball(dir.path(), "1", "f.mry");
    std::fs::write(dir.path().join("bad.toml"), "[params]\np = 2.0\nlambda = 0.5\nkappa = 1.0\n").unwrap();
    let o = morrey(dir.path(), &["norm", "-i", "f.mry", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = morrey(dir.path(), &["norm", "-i", "missing.mry"]);
    assert_eq!(o.status.code(), Some(2));
    let o = morrey(dir.path(), &["apply", "-i", "f.mry", "--op", r#"{"kind":"maximal","alpha":1}"#, "-o", "m.mry"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_ball(d, "1", "f.mry");
    let args = ["check", "vanishing", "-i", "f.mry", "--p", "1.5", "--lambda", "0.3", "--ladder", "0.01,1.25,40"];
    let o = morrey(d, &[&args[..], &["--save-config", "run.toml", "-o", "a.json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let o = morrey(d, &["check", "vanishing", "-i", "f.mry", "--config", "run.toml", "-o", "a.json"]);
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read(d.join("a.json")).unwrap();
    let o = morrey(d, &[&args[..], &["-o", "a.json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), first);
    let r = json(d, "a.json");
    assert_eq!(r["config"]["ladder"]["count"], 40);
    assert_eq!(r["config"]["params"]["p"], 1.5);
}

#[test]
fn report_merge_propagates_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth_ball(d, "0.1", "f.mry");
    morrey(d, &["check", "dominance", "--name", "sharp-vs-max", "-i", "f.mry", "-o", "ok.json"]);
    morrey(d, &["check", "dominance", "--name", "sharp-vs-max", "--constant", "1.9", "-i", "f.mry", "-o", "bad.json"]);
    assert_eq!(morrey(d, &["report-merge", "-i", "ok.json", "-o", "m1.json"]).status.code(), Some(0));
    assert_eq!(morrey(d, &["report-merge", "-i", "ok.json", "bad.json", "-o", "m2.json"]).status.code(), Some(1));
    assert_eq!(json(d, "m2.json")["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn apply_matches_oracle_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = morrey(d, &["synth", "--family", "gaussian", "--grid", "1,4,512", "-o", "g.mry"]);
    assert_eq!(o.status.code(), Some(0));
    let op = r#"{"kind":"hardy_upper","alpha":0.25}"#;
    assert_eq!(morrey(d, &["apply", "-i", "g.mry", "--op", op, "-o", "fast.mry"]).status.code(), Some(0));
    assert_eq!(morrey(d, &["apply", "-i", "g.mry", "--op", op, "--oracle", "-o", "slow.mry"]).status.code(), Some(0));
    let a = morrey::grid::read_grid(d.join("fast.mry")).unwrap();
    let b = morrey::grid::read_grid(d.join("slow.mry")).unwrap();
    assert!(morrey::grid::relative_error(a.values(), b.values()) <= 1e-10);
}
