use std::path::Path;
use std::process::Command;

use loewner_cli::{run, EXIT_INDETERMINATE, EXIT_INVALID, EXIT_OK};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("loewner").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn counterexample(dir: &Path, n: usize, t: f64) -> String {
    let path = dir.join(format!("c{n}.json"));
    let p = path.to_str().unwrap().to_string();
    let (code, _, err) = call(&["counterexample", "--n", &n.to_string(), "--t", &t.to_string(), "--out", &p]);
    assert_eq!(code, EXIT_OK, "{err}");
    p
}

#[test]
fn eval_scalar_example() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("one.json");
    std::fs::write(&rep, r#"{"dim":1,"A":[[[0,0]]],"Y":[[[1,0]]],"alpha":[[1,0]]}"#).unwrap();
    let (code, out, _) = call(&["eval", "--rep", rep.to_str().unwrap(), "--z", "0+1i,0+2i"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "0 + 1i");
}

#[test]
fn counterexample_moments() {
    let dir = tempfile::tempdir().unwrap();
    let rep = counterexample(dir.path(), 3, 0.5);
    let (code, out, err) = call(&["moments", "--rep", &rep, "--b", "1,1", "--max-order", "5"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!((rows[2][3] - 2.0).abs() < 1e-12);
    assert!((rows[4][3] - 8.0).abs() < 1e-12);
    assert!(rows[3][5] < 1e-8 && rows[4][5] > 1e-3);
    assert!(err.contains("r_5"));
}

#[test]
fn classify_reports_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    let rep = counterexample(dir.path(), 3, 0.5);
    let (code, out, _) = call(&["classify", "--rep", &rep, "--max-N", "4", "--no-meta"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["first_nonpolynomial_scalar"], 5);
    assert_eq!(v["levels"][2]["function"], "Out");
    assert_eq!(v["levels"][1]["function"], "In");
    assert_eq!(v["discrepancies"].as_array().unwrap().len(), 0);
    assert!(v.get("meta").is_none());
}

#[test]
fn outputs_are_deterministic_without_meta() {
    let dir = tempfile::tempdir().unwrap();
    let rep = counterexample(dir.path(), 3, 0.25);
    for args in [
        vec!["classify", "--rep", &rep, "--max-N", "2", "--no-meta"],
        vec!["residues", "--rep", &rep, "--max-order", "3", "--no-meta"],
        vec!["telescope", "--rep", &rep, "--b", "1,2", "--max-N", "2"],
    ] {
        assert_eq!(call(&args).1, call(&args).1);
    }
}

#[test]
fn counterexample_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let rep = counterexample(dir.path(), 4, 0.75);
    let text = std::fs::read_to_string(&rep).unwrap();
    let src = loewner::io::parse_rep(&text).unwrap();
    assert_eq!(loewner::io::rep_to_json(src.rep().unwrap()).trim(), text.trim());
}

#[test]
fn report_merges_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let rep = counterexample(dir.path(), 3, 0.5);
    let a = dir.path().join("a.json");
    let (code, _, _) = call(&["classify", "--rep", &rep, "--max-N", "2", "--report", a.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = call(&["report", a.to_str().unwrap(), a.to_str().unwrap(), "--no-meta"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert_eq!(v["reports"][0]["report"]["kind"], "classification");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["--help"]).0, EXIT_OK);
    assert_eq!(call(&["--version"]).0, EXIT_OK);
    assert_eq!(call(&["frobnicate"]).0, EXIT_INVALID);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":1,"A":[[[0,0]]],"Y":[[[1.5,0]]],"alpha":[[1,0]]}"#).unwrap();
    let (code, _, err) = call(&["eval", "--rep", bad.to_str().unwrap(), "--z", "0+1i,0+1i"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("positive contraction"), "{err}");
    let rep = counterexample(dir.path(), 3, 0.5);
    assert_eq!(call(&["eval", "--rep", &rep, "--z", "0-1i,0+1i"]).0, EXIT_INVALID);
    assert_eq!(call(&["counterexample", "--n", "1", "--t", "0.5"]).0, EXIT_INVALID);

    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"measure":{"atoms":[[1000,1],[2000,1]]}}"#).unwrap();
    let (code, _, _) = call(&["classify", "--rep", m.to_str().unwrap(), "--max-N", "1", "--strict", "--no-meta"]);
    assert_eq!(code, EXIT_INDETERMINATE);
}

#[test]
fn binary_forwards_exit_code() {
    let status = Command::new(env!("CARGO_BIN_EXE_loewner")).arg("nope").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INVALID));
    let ok = Command::new(env!("CARGO_BIN_EXE_loewner")).arg("--version").output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains(env!("CARGO_PKG_VERSION")));
}
