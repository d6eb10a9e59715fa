use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn globact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_globact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = globact(&all);
    let doc = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().expect("exit code"), doc)
}

fn write_path(dir: &tempfile::TempDir, name: &str, rows: &[[u16; 3]]) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(rows).unwrap()).unwrap();
    p
}

#[test]
fn pi0_counts() {
    for (ring, size) in [("GF:2", 7), ("GF:3", 26), ("Zmod:4", 56)] {
        let (code, doc) = json(&["pi0", "--ring", ring, "--n", "3"]);
        assert_eq!(code, 0);
        assert_eq!(doc["result"]["class_count"], 1);
        assert_eq!(doc["result"]["classes"][0]["size"], size);
    }
    let out = globact(&["pi0", "--ring", "GF:2"]);
    assert!(stdout(&out).contains("1 class(es) over 7 rows"));
}

#[test]
fn pi1_with_cross_check() {
    let (code, doc) = json(&["pi1", "--ring", "GF:2", "--n", "3", "--cross-check"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["order"], 1);
    assert_eq!(doc["result"]["ep_order"], 24);
    assert_eq!(doc["result"]["ep2_order"], 24);
    assert_eq!(doc["result"]["search_order"], 1);
    let (code, doc) = json(&["pi1", "--ring", "Zmod:4"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["order"], 1);
}

#[test]
fn verify_passes() {
    for ring in ["Zmod:4", "GFpoly:2:0,0,1"] {
        let out = globact(&["verify", "--ring", ring, "--n", "3"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("status: PASS"));
    }
}

#[test]
fn json_schema() {
    let (code, doc) = json(&["verify", "--ring", "GF:2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["schema"], "globact-report/1");
    assert_eq!(doc["config"]["ring"], "GF:2");
    assert_eq!(doc["config"]["command"]["verb"], "verify");
    assert_eq!(doc["status"], "pass");
    assert!(doc.get("wall_time_ms").is_none());
    let checks = doc["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["name"].is_string() && c["status"].is_string()));
    let skipped: Vec<&Value> = checks.iter().filter(|c| c["status"] == "skipped").collect();
    assert!(!skipped.is_empty());
    assert!(skipped.iter().all(|c| !c["detail"].as_str().unwrap().is_empty()));
    let (_, timed) = json(&["pi0", "--ring", "GF:2", "--timing"]);
    assert!(timed["wall_time_ms"].is_u64());
}

#[test]
fn deterministic_json() {
    let args = ["pi1", "--ring", "GF:2", "--cross-check", "--seed", "11", "--format", "json"];
    assert_eq!(globact(&args).stdout, globact(&args).stdout);
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = globact(&["pi0", "--ring", "GF:2", "--format", "json", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(doc["result"]["rows"], 7);
}

#[test]
fn homotopy_answers() {
    let dir = tempfile::tempdir().unwrap();
    let omega = write_path(&dir, "omega.json", &[[1, 0, 0], [1, 1, 0], [0, 1, 0]]);
    let padded = write_path(&dir, "padded.json", &[[1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 1, 0]]);
    let there_and_back = write_path(
        &dir,
        "loop.json",
        &[[1, 0, 0], [1, 1, 0], [0, 1, 0], [1, 1, 0], [1, 0, 0]],
    );
    let constant = write_path(&dir, "const.json", &[[1, 0, 0]]);
    let other = write_path(&dir, "other.json", &[[1, 0, 0], [1, 0, 1], [0, 0, 1], [0, 1, 1], [0, 1, 0]]);

    let run = |a: &PathBuf, b: &PathBuf, extra: &[&str]| {
        let mut args = vec![
            "homotopy",
            "--ring",
            "GF:2",
            "--path-a",
            a.to_str().unwrap(),
            "--path-b",
            b.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        json(&args)
    };
    let (code, doc) = run(&omega, &padded, &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["answer"], "yes");
    let (code, doc) = run(&there_and_back, &constant, &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["answer"], "yes");
    let (code, doc) = run(&omega, &other, &["--cap-steps", "1"]);
    assert_eq!(code, 3);
    assert_eq!(doc["result"]["answer"], "undecided");
}

#[test]
fn malformed_paths() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_path(&dir, "good.json", &[[1, 0, 0]]);
    let zero = write_path(&dir, "zero.json", &[[0, 0, 0]]);
    let jump = write_path(&dir, "jump.json", &[[1, 0, 0], [0, 1, 1]]);
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json").unwrap();
    for bad in [&zero, &jump, &junk] {
        let out = globact(&[
            "homotopy",
            "--ring",
            "GF:2",
            "--path-a",
            good.to_str().unwrap(),
            "--path-b",
            bad.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(1), "{}", bad.display());
    }
}

#[test]
fn validate_action_passes() {
    let (code, doc) = json(&["validate-action", "--ring", "GF:3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["cover_points"], 26);
}

#[test]
fn exit_codes() {
    assert_eq!(globact(&["pi0", "--ring", "GF:2", "--n", "2"]).status.code(), Some(1));
    assert_eq!(globact(&["pi0"]).status.code(), Some(1));
    assert_eq!(globact(&["pi0", "--ring", "GF:4"]).status.code(), Some(1));
    assert_eq!(globact(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(globact(&["pi0", "--ring", "GF:2", "--cap-steps", "0"]).status.code(), Some(1));
    assert_eq!(globact(&["--help"]).status.code(), Some(0));
    assert_eq!(
        globact(&["pi1", "--ring", "GF:3", "--cap-closure", "100"]).status.code(),
        Some(2)
    );
}
