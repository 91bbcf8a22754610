use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ckylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckylab"))
        .args(args)
        .env_remove("CKYLAB_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn solve_grs_is_strict_and_not_closed() {
    let out = ckylab(&["solve", "--family", "grs", "--params", "r=1,s=2", "--degree", "2", "--kind", "cky"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["results"]["dimension"], 1);
    assert_eq!(v["results"]["classification"][0]["strict"], true);
    assert_eq!(v["results"]["classification"][0]["closed"], false);
}

#[test]
fn solve_abelian_parallel_and_h5_ky() {
    let out = ckylab(&["solve", "--family", "abelian", "--degree", "2", "--kind", "parallel"]);
    assert_eq!(json(&out)["results"]["dimension"], 10);
    let out = ckylab(&["solve", "--family", "h5", "--params", "a1=1,a2=1", "--degree", "2", "--kind", "ky"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["dimension"], 0);
}

#[test]
fn input_errors_exit_with_two() {
    let out = ckylab(&["solve", "--family", "g4", "--params", "s=2", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "error");
    let out = ckylab(&["solve", "--family", "nope", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ckylab(&["solve", "--input", "/nonexistent/file.json", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, "{{\"dim\": 3, ").unwrap();
    let out = ckylab(&["solve", "--input", bad.path().to_str().unwrap(), "--degree", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ckylab(&["solve", "--family", "grs", "--degree", "2", "--kind", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ckylab(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_tolerance_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_ckylab"))
        .args(["solve", "--family", "grs", "--degree", "2"])
        .env("CKYLAB_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ckylab"))
        .args(["solve", "--family", "grs", "--degree", "2"])
        .env("CKYLAB_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn impossible_tolerance_reports_claim_failure() {
    // with a zero residual tolerance the reference form no longer classifies
    let out = ckylab(&["verify", "identities", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
}

#[test]
fn emitted_algebra_round_trips() {
    for (family, params) in [("g6", "t=2,c=1"), ("su2xR2", "r=1,s=2"), ("g7_delta", "c=-1")] {
        let shown = ckylab(&["catalog", "show", family, "--params", params]);
        assert_eq!(shown.status.code(), Some(0));
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(&shown.stdout).unwrap();
        let path = file.path().to_str().unwrap();
        for kind in ["cky", "ky", "star-ky", "parallel"] {
            let direct = json(&ckylab(&["solve", "--family", family, "--params", params, "--degree", "2", "--kind", kind]));
            let loaded = json(&ckylab(&["solve", "--input", path, "--degree", "2", "--kind", kind]));
            assert_eq!(direct["results"]["dimension"], loaded["results"]["dimension"], "{family} {kind}");
            for key in ["max_residual", "reference_projection_residual"] {
                let a = direct["results"][key].as_f64().unwrap_or(0.0);
                let b = loaded["results"][key].as_f64().unwrap_or(0.0);
                assert!((a - b).abs() <= 1e-12, "{family} {kind} {key}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let args = ["solve", "--family", "g3", "--degree", "2", "--kind", "cky"];
    let j = json(&ckylab(&[&args[..], &["--format", "json"]].concat()));
    let text = String::from_utf8(ckylab(&[&args[..], &["--format", "text"]].concat()).stdout).unwrap();
    let coefficient = j["results"]["basis"][0]["terms"][0]["value"].as_f64().unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("results.basis[0].terms[0].value = "))
        .unwrap();
    let parsed: f64 = line.rsplit(" = ").next().unwrap().parse().unwrap();
    assert_eq!(parsed, coefficient);
}

#[test]
fn catalog_lists_every_family() {
    let out = ckylab(&["catalog", "list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["g3", "g2", "g8_lambda", "g4", "g5", "g6", "g7_delta", "h5", "grs", "L59", "su2xR2", "sl2xR2", "dim3center", "abelian"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
}

#[test]
fn verify_tables_passes() {
    let out = ckylab(&["verify", "tables"]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(0), "{v}");
    assert_eq!(v["results"]["failed"], 0);
}
