use std::process::{Command, Output};

use serde_json::Value;

fn alg_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alg-lab")).args(args).env_remove("ALG_LAB_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn sect_on_hermitian_witness() {
    let out = alg_lab(&["sect", "herm:3:0", "--x", "diag(1,0,-1)", "--y", "sym(1,3)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["value"], 1.5);
    assert_eq!(v["result"]["exact"], "3/2");
    assert_eq!(v["tool"], "alg-lab");
}

#[test]
fn constant_sect_reports_exact_value() {
    let out = alg_lab(&["constant-sect", "preset:c_epsilon:0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["constant"], "1/4");
    let out = alg_lab(&["constant-sect", "c_epsilon:3/10"]);
    assert_eq!(json(&out)["result"]["constant"], "4/25");
}

#[test]
fn table_suite_passes() {
    let out = alg_lab(&["verify", "table1", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["result"]["passed"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(alg_lab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(alg_lab(&["info", "no_such_preset"]).status.code(), Some(2));
    assert_eq!(alg_lab(&["extrema", "herm:3:0", "--starts", "many"]).status.code(), Some(2));
    assert_eq!(alg_lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn built_files_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c1.json");
    let p = path.to_str().unwrap();
    assert_eq!(alg_lab(&["build", "c_epsilon:1", "--out", p]).status.code(), Some(0));
    let from_file = json(&alg_lab(&["sect", p, "--x", "1,1,0", "--y", "0,1,1"]));
    let from_preset = json(&alg_lab(&["sect", "c_epsilon:1", "--x", "1,1,0", "--y", "0,1,1"]));
    assert_eq!(from_file["result"], from_preset["result"]);
    let info = json(&alg_lab(&["info", p]));
    assert_eq!(info["result"]["dim"], 3);
    assert_eq!(info["result"]["metric"]["invariant"], true);
}

#[test]
fn malformed_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "mode": "rational", "constants": [[0, 0, 2, "1"]], "metric": [[1, 0], [0, 1]]}"#).unwrap();
    let out = alg_lab(&["info", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constants[0]"));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_alg-lab"));
        cmd.args(["idempotents", "c_epsilon:1", "--starts", "8"]).env_remove("ALG_LAB_SEED");
        if let Some(s) = seed {
            cmd.env("ALG_LAB_SEED", s);
        }
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(None)["seed"], 0x5EC7);
    assert_eq!(run(Some("42"))["seed"], 42);
    assert_eq!(run(Some("0x10"))["seed"], 16);
    let explicit = json(&alg_lab(&["idempotents", "c_epsilon:1", "--starts", "8", "--seed", "42"]));
    assert_eq!(explicit["result"], run(Some("42"))["result"]);
}

#[test]
fn csv_reports() {
    let out = alg_lab(&["--format", "csv", "spectrum", "c_epsilon:1", "--e", "1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("result.exact.0,-1/2\n"), "{text}");
    assert!(text.contains("result.exact.1,3/2\n"), "{text}");
}

#[test]
fn list_presets_names_the_catalog() {
    let v = json(&alg_lab(&["list-presets"]));
    let names: Vec<&str> = v["result"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    for n in ["herm", "c_epsilon", "okubo_compact", "so3_killing"] {
        assert!(names.contains(&n));
    }
}
