use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ovi_core::generators::fixture;
use ovi_core::model::save_instance;
use serde_json::Value;
use tempfile::TempDir;

fn ovi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ovi")).args(args).env_remove("OVI_MAX_POINTS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn preset(dir: &TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.json"));
    let out = ovi(&["gen", "--preset", name, "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_preset_matches_fixture_serialization() {
    let dir = TempDir::new().unwrap();
    for name in ["E1", "E2", "E3_antichain", "E4_nonlinearA", "E1_negA"] {
        let path = preset(&dir, name);
        assert_eq!(std::fs::read(path).unwrap(), save_instance(&fixture(name).unwrap()));
    }
    assert_eq!(code(&ovi(&["gen", "--preset", "E7"])), 4);
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let e1 = preset(&dir, "E1");
    let out = ovi(&["check", s(&e1)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["V3"]["witness"], serde_json::json!({"kind": "ascending", "x_prime": 0, "u_prime": 0}));

    let neg = preset(&dir, "E1_negA");
    let out = ovi(&["check", s(&neg)]);
    assert_eq!(code(&out), 2);
    let report = stdout_json(&out);
    assert_eq!(report["V4"]["witness"]["kind"], "not_increasing");
    assert_eq!(report["V6"]["witness"], serde_json::json!({"kind": "pairing", "x": 0, "t": 1}));

    let bad = dir.path().join("malformed.json");
    std::fs::write(&bad, "{\"spaces\": ").unwrap();
    let out = ovi(&["check", s(&bad)]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    assert_eq!(code(&ovi(&["check", "/nonexistent/instance.json"])), 4);
}

#[test]
fn check_with_probe_file() {
    let dir = TempDir::new().unwrap();
    let e1 = preset(&dir, "E1");
    let probes = dir.path().join("probes.json");
    std::fs::write(&probes, r#"{"f": [[-1], ["1/2"]]}"#).unwrap();
    assert_eq!(code(&ovi(&["check", s(&e1), "--probes", s(&probes)])), 0);
    std::fs::write(&probes, r#"{"g": [[1, 2]]}"#).unwrap();
    assert_eq!(code(&ovi(&["check", s(&e1), "--probes", s(&probes)])), 4);
    std::fs::write(&probes, r#"{"h": []}"#).unwrap();
    assert_eq!(code(&ovi(&["check", s(&e1), "--probes", s(&probes)])), 4);
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = ovi(&["solve", s(&preset(&dir, "E1"))]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["solutions"], serde_json::json!([{"index": 0, "point": [0]}]));
    assert_eq!(report["consistent"], true);

    let e3 = preset(&dir, "E3_antichain");
    assert_eq!(code(&ovi(&["solve", s(&e3)])), 3);
    let out = ovi(&["solve", s(&e3), "--method", "ascend"]);
    assert_eq!(code(&out), 3);
    assert!(stdout_json(&out)["notes"][0].as_str().unwrap().starts_with("ascent skipped"));

    let out = ovi(&["solve", s(&preset(&dir, "E2")), "--method", "enumerate"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["ascent"], Value::Null);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = ovi(&["verify", s(&preset(&dir, "E1")), "--suite", "eq15,thm32,lemma41"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["eq15"]["verdict"], "holds");
    assert_eq!(v["thm32"]["verdict"], "holds");
    assert_eq!(v["lemma41"]["verdict"], "holds");
    assert!(v.get("ovi").is_none());

    let out = ovi(&["verify", s(&preset(&dir, "E2")), "--suite", "ovi"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["ovi"]["verdict"], "holds");

    let out = ovi(&["verify", s(&preset(&dir, "E4_nonlinearA"))]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["lemma41"]["verdict"], "not-applicable");

    assert_eq!(code(&ovi(&["verify", s(&preset(&dir, "E1")), "--suite", "eq16"])), 4);
}

/// Nonnegative preservation checked on points of C only does not give the
/// argmin collapse; the verifier reports it rather than hiding it.
#[test]
fn verify_reports_a_failure() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("gap.json");
    std::fs::write(
        &path,
        r#"{
  "spaces": {
    "X": {"dim": 1, "order": {"type": "componentwise"}},
    "Y": {"dim": 1, "order": {"type": "componentwise"}},
    "U": {"dim": 1, "order": {"type": "componentwise"}},
    "V": {"dim": 1, "order": {"type": "componentwise"}}
  },
  "C": [[-1], [-2]],
  "D": [[-1], [-2]],
  "f": [[[1]], [[1]]],
  "g": [[[-1]], [[-1]]],
  "A": {"kind": "linear", "matrix": [[1]]}
}"#,
    )
    .unwrap();
    let out = ovi(&["verify", s(&path), "--suite", "lemma41"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["lemma41"]["witness"]["kind"], "argmin_collapse");
}

#[test]
fn gen_is_deterministic_and_satisfying_output_checks() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(code(&ovi(&["gen", "--seed", "7", "--kind", "satisfying", "-o", s(p)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let doc: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(doc["meta"]["seed"], 7);
    assert_eq!(doc["meta"]["generator"], "satisfying");
    assert_eq!(code(&ovi(&["check", s(&a)])), 0);
    assert_eq!(code(&ovi(&["verify", s(&a), "--suite", "thm32"])), 0);

    let out = ovi(&["gen", "--seed", "3", "--kind", "ovi", "--points", "5", "--dim", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["meta"]["points"], 5);
    assert_eq!(code(&ovi(&["gen", "--seed", "3", "--points", "20"])), 4);
    assert_eq!(code(&ovi(&["gen"])), 4);
}

#[test]
fn point_cap_override() {
    let dir = TempDir::new().unwrap();
    let e1 = preset(&dir, "E1");
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_ovi")).args(["check", s(&e1)]).env("OVI_MAX_POINTS", cap).output().unwrap()
    };
    assert_eq!(code(&run("2")), 4);
    assert_eq!(code(&run("3")), 0);
    assert_eq!(code(&run("many")), 4);
}

#[test]
fn json_flag_is_accepted() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&ovi(&["--json", "solve", s(&preset(&dir, "E1"))])), 0);
    assert_eq!(code(&ovi(&["check", "--json", s(&preset(&dir, "E2"))])), 0);
}
