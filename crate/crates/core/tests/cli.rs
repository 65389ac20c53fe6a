use std::fs;
use std::path::Path;

use qwalk::cli::run;

fn qwalk(args: &[&str]) -> i32 {
    run(std::iter::once("qwalk").chain(args.iter().copied()))
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let path = out.to_str().unwrap().to_owned();
    full.extend(["--out", &path]);
    let code = qwalk(&full);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn csv_column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn residual_example_passes_assert() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(
        dir.path(),
        "res.csv",
        &["decouple-residual", "--walk", "dirac2", "--mass", "0.35", "--eps", "0.1", "--grid", "64,64", "--steps", "100", "--seed", "7", "--assert"],
    );
    assert_eq!(code, 0);
    assert!(csv.starts_with("# qwalk "));
    let res = csv_column(&csv, "residual");
    assert_eq!(res.len(), 99);
    assert!(res.iter().all(|r| *r <= 1e-12));
}

#[test]
fn lemma_pauli_ratios_approach_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(dir.path(), "lemma.csv", &["lemma-check", "--dim", "2", "--A", "1,0,0", "--eps-list", "0.2,0.1,0.05"]);
    assert_eq!(code, 0);
    let ratios = csv_column(&csv, "ratio_re");
    let dist: Vec<f64> = ratios.iter().map(|r| (r + 1.0).abs()).collect();
    assert!(dist.windows(2).all(|p| p[1] < p[0]));
    assert!(dist[2] <= 0.05);
}

#[test]
fn weyl_axis_dispersion_example() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv) = run_to(
        dir.path(),
        "disp.csv",
        &["dispersion", "--walk", "weyl3", "--eps", "0.1", "--ksamples", "1", "--k", "2.5,0,0", "--assert"],
    );
    assert_eq!(code, 0);
    let errs = csv_column(&csv, "abs_err");
    assert!(errs[errs.len() - 2..].iter().all(|e| *e <= 1e-12));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let literal = ["conjecture-check", "--mass", "0.35", "--eps-list", "0.2,0.1,0.05,0.025", "--literal-sign", "on", "--assert"];
    assert_eq!(run_to(dir.path(), "lit.csv", &literal).0, 1);
    assert_eq!(run_to(dir.path(), "lit2.csv", &literal[..7]).0, 0);
    assert_eq!(qwalk(&["degeneracy", "--walk", "dirac5", "--eps", "0.1"]), 2);
    assert_eq!(qwalk(&["decouple-residual", "--walk", "dirac2", "--eps", "0.1", "--grid", "64,64", "--steps", "4", "--k", "1.0,0"]), 2);
    assert_eq!(qwalk(&["convergence", "--walk", "dirac2", "--k", "0.5,x", "--omega", "0.9", "--eps-list", "0.1,0.05,0.02"]), 2);
    assert_eq!(qwalk(&["no-such-command"]), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["dispersion", "--walk", "dirac3", "--mass", "0.35", "--eps", "0.1", "--ksamples", "50", "--seed", "3"];
    let (_, a) = run_to(dir.path(), "a.csv", &args);
    let (_, b) = run_to(dir.path(), "a.csv", &args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn json_mirrors_csv_fields() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["degeneracy", "--walk", "dirac3", "--mass", "0.35", "--eps", "0.1", "--samples", "20"];
    let (_, csv) = run_to(dir.path(), "d.csv", &args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let (code, json) = run_to(dir.path(), "d.json", &json_args);
    assert_eq!(code, 0);
    let header: Vec<&str> = csv.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().filter(|l| !l.starts_with('#')).count() - 1);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, header);
}
