use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn disc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn generate_certify_solve_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = disc(
        d,
        &[
            "gen",
            "matrix",
            "--rows",
            "12",
            "--cols",
            "80",
            "--r",
            "8",
            "--delta",
            "3",
            "--density",
            "0.2",
            "--seed",
            "4",
            "--output",
            "m.mtx",
        ],
    );
    assert_eq!(
        gen.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&gen.stderr)
    );

    let cert = disc(d, &["certify", "m.mtx"]);
    assert_eq!(cert.status.code(), Some(0));
    assert_eq!(json(&cert)["pass"], true);

    let solve = disc(d, &["solve", "m.mtx", "--seed", "9"]);
    assert_eq!(solve.status.code(), Some(0));
    let doc = json(&solve);
    assert_eq!(doc["solve"]["reduced"]["result"]["certified"], true);
    let max = doc["solve"]["lifted"]["max"].as_f64().unwrap();
    assert!(max <= doc["solve"]["lifted"]["theorem_bound"].as_f64().unwrap());

    // same seed, same bytes
    let again = disc(d, &["solve", "m.mtx", "--seed", "9"]);
    assert_eq!(solve.stdout, again.stdout);

    let base = disc(d, &["solve", "m.mtx", "--mode", "baseline"]);
    assert_eq!(base.status.code(), Some(0));
    assert!(json(&base)["discrepancy"]["max"].is_number());
}

#[test]
fn hypergraph_direct_and_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = disc(
        d,
        &[
            "gen",
            "hypergraph",
            "--vertices",
            "256",
            "--r",
            "32",
            "--delta",
            "3",
            "--seed",
            "2",
            "--output",
            "h.edges",
        ],
    );
    assert_eq!(gen.status.code(), Some(0));

    let direct = disc(d, &["solve", "h.edges", "--mode", "direct"]);
    assert_eq!(direct.status.code(), Some(0));
    let doc = json(&direct);
    assert_eq!(doc["result"]["certified"], true);
    assert!(doc["result"]["achieved"].as_f64().unwrap() <= doc["bounds"]["direct_ln"].as_f64().unwrap());

    let reduce = disc(d, &["solve", "h.edges", "--mode", "reduce"]);
    assert_eq!(reduce.status.code(), Some(0));
    assert!(json(&reduce)["hypergraph_bounds"]["reduction_lg"].is_number());
}

#[test]
fn oracle_on_small_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    disc(
        d,
        &[
            "gen",
            "matrix",
            "--rows",
            "4",
            "--cols",
            "10",
            "--r",
            "4",
            "--delta",
            "2",
            "--density",
            "0.5",
            "--output",
            "s.mtx",
        ],
    );
    let out = disc(d, &["oracle", "s.mtx"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["y"].as_array().unwrap().len(), 10);
    assert!(doc["optimum"].as_f64().unwrap() >= 0.0);

    let wide = disc(
        d,
        &[
            "gen", "matrix", "--rows", "2", "--cols", "30", "--r", "4", "--delta", "2", "--output", "w.mtx",
        ],
    );
    assert_eq!(wide.status.code(), Some(0));
    assert_eq!(disc(d, &["oracle", "w.mtx"]).status.code(), Some(1));
}

#[test]
fn bench_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("b.toml"),
        r#"
family = "matrix"
seeds = [0, 1]
modes = ["reduce", "baseline", "oracle"]

[[grid]]
rows = 4
cols = 12
r = 4.0
delta = 2.0
density = 0.4
"#,
    )
    .unwrap();
    let out = disc(
        d,
        &["bench", "b.toml", "--csv", "rows.csv", "--output", "report.json"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 6);
    let csv = fs::read_to_string(d.join("rows.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // usage error
    assert_eq!(disc(d, &["solve"]).status.code(), Some(2));
    // missing file
    assert_eq!(disc(d, &["certify", "nope.mtx"]).status.code(), Some(2));
    // malformed file
    fs::write(
        d.join("bad.mtx"),
        "%%MatrixMarket matrix coordinate real general\n1 1 1\n",
    )
    .unwrap();
    assert_eq!(disc(d, &["certify", "bad.mtx"]).status.code(), Some(2));
    // direct mode needs a hypergraph
    disc(
        d,
        &[
            "gen", "matrix", "--rows", "3", "--cols", "5", "--r", "4", "--delta", "2", "--output", "m.mtx",
        ],
    );
    assert_eq!(
        disc(d, &["solve", "m.mtx", "--mode", "direct"]).status.code(),
        Some(2)
    );
    // a perfect matching is outside the direct regime
    fs::write(d.join("pm.edges"), "e 1 2\ne 3 4\n").unwrap();
    let out = disc(d, &["solve", "pm.edges", "--mode", "direct"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
