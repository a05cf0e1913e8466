use std::path::Path;
use std::process::{Command, Output};

use opalg::linmap::opposite_transfer;
use opalg::Algebra;
use serde_json::Value;

fn opalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opalg"))
        .args(args)
        .env_remove("OPALG_SEED")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_is_deterministic() {
    let a = opalg(&["generate", "jordan", "--seed", "7"]);
    let b = opalg(&["generate", "jordan", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_can_come_from_environment() {
    let flag = opalg(&["generate", "map", "--seed", "11"]);
    let env = Command::new(env!("CARGO_BIN_EXE_opalg"))
        .args(["generate", "map"])
        .env("OPALG_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn check_jordan_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let jordan = json_stdout(&opalg(&["generate", "jordan", "--seed", "3"]));
    let path = write(dir.path(), "j.json", &jordan);
    let out = opalg(&["check-jordan", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["jordan"], Value::Bool(true));

    let map = json_stdout(&opalg(&["generate", "map", "--seed", "3"]));
    let path = write(dir.path(), "m.json", &map);
    assert_eq!(opalg(&["check-jordan", &path]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(opalg(&["check-jordan", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(opalg(&["check-jordan", "/nonexistent/map.json"]).status.code(), Some(2));
    assert_eq!(opalg(&["generate", "nope"]).status.code(), Some(2));
    assert_eq!(opalg(&["conjecture", "--p", "2", "--trials", "1"]).status.code(), Some(2));
    assert_eq!(opalg(&["cbnorm", "x.json", "--p", "0.5"]).status.code(), Some(2));
}

#[test]
fn stormer_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let jordan = json_stdout(&opalg(&["generate", "jordan", "--seed", "5"]));
    let path = write(dir.path(), "j.json", &jordan);
    let out_path = dir.path().join("d.json");
    let out = opalg(&["stormer", &path, "-o", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    for key in ["g", "f", "pi", "sigma", "assignments"] {
        assert!(v["decomposition"].get(key).is_some(), "{key}");
    }
}

#[test]
fn cbnorm_of_transpose() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", &opposite_transfer(&Algebra::full(2)));
    let out = opalg(&["cbnorm", &path, "--p", "inf", "--k-max", "2", "--restarts", "2", "--seed", "1"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert!((v["lower"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(v["certified"], Value::Bool(true));

    let out = opalg(&["cbnorm", &path, "--p", "1", "--k-max", "2", "--restarts", "2"]);
    let v = json_stdout(&out);
    assert!((v["lower"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert_eq!(v["certified"], Value::Bool(false));
}

#[test]
fn yeadon_build_then_factorize() {
    let dir = tempfile::tempdir().unwrap();
    let jordan = json_stdout(&opalg(&["generate", "jordan", "--seed", "9"]));
    let path = write(dir.path(), "j.json", &jordan);
    let built = opalg(&["yeadon", "build", &path, "--p", "4/3"]);
    assert!(built.status.success());
    let v = json_stdout(&built);
    assert!(v["triple"].get("J").is_some());
    let t_path = write(dir.path(), "t.json", &v["map"]);
    let fact = opalg(&["yeadon", "factorize", &t_path, "--p", "4/3"]);
    assert!(fact.status.success(), "{}", String::from_utf8_lossy(&fact.stderr));
    let triple = json_stdout(&fact);
    for key in ["w", "b", "J", "p"] {
        assert!(triple.get(key).is_some(), "{key}");
    }
    assert_eq!(opalg(&["yeadon", "build", &path, "--p", "2"]).status.code(), Some(2));
    // a random map is not an isometry of this form
    let map = json_stdout(&opalg(&["generate", "map", "--seed", "1"]));
    let m_path = write(dir.path(), "m.json", &map);
    assert_eq!(opalg(&["yeadon", "factorize", &m_path, "--p", "1"]).status.code(), Some(1));
}

#[test]
fn verify_and_conjecture_pass() {
    for suite in ["local-lifting", "cor-cp", "thm-main", "lifting-contract", "stormer", "yeadon"] {
        let out = opalg(&["verify", suite, "--seed", "2", "--trials", "3"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        let v = json_stdout(&out);
        assert_eq!(v["passed"], Value::Bool(true));
        assert_eq!(v["records"].as_array().unwrap().len(), 3);
    }
    let out = opalg(&["conjecture", "--p", "1", "--trials", "2", "--k-max", "2", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["suite"], "conjecture");
}
