use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use toeplitz_core::format;
use toeplitz_core::sequence::materialize;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn toeplitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz")).args(args).output().unwrap()
}

fn structured(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let out = toeplitz(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

/// `M_p` of the periodic word `pattern` by direct search: the longest run of
/// consecutive integers whose classes mod `p` are constant.
fn max_block_oracle(pattern: &str, p: usize) -> Option<usize> {
    let w: Vec<char> = pattern.chars().collect();
    let span = p * w.len();
    let constant = |n: usize| (0..span / p).all(|k| w[(n + k * p) % w.len()] == w[n % w.len()]);
    let mut best = 0;
    let mut run = 0;
    for n in 0..2 * p {
        run = if constant(n % p) { run + 1 } else { 0 };
        best = best.max(run);
    }
    (best < 2 * p).then_some(best)
}

#[test]
fn analyze_fill_matches_the_oracle() {
    let file = data("fill.toml");
    let (v, code) = structured(&["analyze", file.to_str().unwrap(), "--period-cap", "12"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "analyze");
    for row in v["results"]["periods"].as_array().unwrap() {
        let p = row["period"].as_u64().unwrap() as usize;
        let want = match max_block_oracle("abac", p) {
            Some(m) => serde_json::json!({ "finite": m }),
            None => serde_json::json!("infinite"),
        };
        assert_eq!(row["max_block"], want, "p = {p}");
    }
    assert_eq!(v["results"]["aperiodic"], serde_json::json!([]));
    assert_eq!(v["verdicts"]["aperiodic_empty"], true);
}

#[test]
fn analyze_constant_has_one_full_row() {
    let file = data("constant.toml");
    let (v, code) = structured(&["analyze", file.to_str().unwrap(), "--period-cap", "1"]);
    assert_eq!(code, 0);
    let rows = v["results"]["periods"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["max_block"], "infinite");
    assert_eq!(rows[0]["essential"], true);
}

#[test]
fn malformed_files_exit_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "alphabet = [\"a\"]\n[rule]\nkind = \"periodic\"\npattern = [\"a\", \"q\"]\n").unwrap();
    let out = toeplitz(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:"), "{err}");
    assert!(err.contains("`q`"), "{err}");

    std::fs::write(&bad, "alphabet = [\"a\"\n").unwrap();
    assert_eq!(toeplitz(&["structure", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(toeplitz(&["eta", "/no/such/file.toml"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    let file = data("fill.toml");
    let f = file.to_str().unwrap();
    assert_eq!(toeplitz(&["analyze", f, "--radius", "100"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["analyze", f, "--format", "yaml"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["--help"]).status.code(), Some(0));
}

#[test]
fn structure_of_a_dyadic_fill() {
    let file = data("dyadic.toml");
    let (v, code) = structured(&["structure", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    let periods: Vec<u64> = v["results"]["structure"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["period"].as_u64().unwrap())
        .collect();
    assert_eq!(periods, [2, 4, 8, 16, 32, 64]);
    // M_{2^j} = 2^j - 1 for this fill
    for e in v["results"]["structure"]["entries"].as_array().unwrap() {
        assert_eq!(e["max_block"]["finite"].as_u64().unwrap(), e["period"].as_u64().unwrap() - 1);
    }
}

#[test]
fn periodic_input_is_inconclusive_for_eta() {
    let file = data("fill.toml");
    let (v, code) = structured(&["eta", file.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(v["results"]["error"].as_str().unwrap().contains("growth"));
    assert!(v["results"]["hint"].is_string());
}

#[test]
fn eta_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.toml");
    for name in ["dyadic.toml", "period_doubling.toml"] {
        let file = data(name);
        let (v, code) = structured(&["eta", file.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}");
        assert!(v["verdicts"].as_object().unwrap().values().all(|b| b == true));
        let w = &v["results"]["eta_window"];
        let (lo, hi) = (w["lo"].as_i64().unwrap(), w["hi"].as_i64().unwrap());
        let eta = format::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let window = materialize(&eta, lo, hi).unwrap();
        let text: String = window.values().iter().map(|&s| eta.alphabet().label(s)).collect();
        assert_eq!(text, w["symbols"].as_str().unwrap(), "{name}");
    }
}

#[test]
fn structured_output_is_deterministic() {
    let file = data("period_doubling.toml");
    let f = file.to_str().unwrap();
    for cmd in ["analyze", "structure", "eta"] {
        let a = toeplitz(&[cmd, f, "--format", "structured", "--radius", "1024", "--period-cap", "32"]);
        let b = toeplitz(&[cmd, f, "--format", "structured", "--radius", "1024", "--period-cap", "32"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn report_can_go_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let file = data("fill.toml");
    let status = toeplitz(&["structure", file.to_str().unwrap(), "--format", "structured", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "config", "results", "verdicts"]);
}

#[test]
fn odometer_operations() {
    let run = |args: &[&str]| {
        let mut all = vec!["odometer", "--moduli", "2,6,12"];
        all.extend(args);
        let out = toeplitz(&all);
        (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
    };
    assert_eq!(run(&["from-integer", "-5"]), ("(1, 1, 7)\n".to_owned(), 0));
    assert_eq!(run(&["add", "(1, 5, 11)", "1"]).0, "(0, 0, 0)\n");
    assert_eq!(run(&["neg", "1"]).0, "(1, 5, 11)\n");
    assert_eq!(run(&["step", "(0, 2, 8)", "--times", "-3"]).0, "(1, 5, 5)\n");
    // coordinates first differ at level 3
    assert_eq!(run(&["distance", "(1, 5, 11)", "5"]).0, "1/3\n");
    let (text, code) = run(&["partition", "2"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("6 classes"), "{text}");

    let bad = toeplitz(&["odometer", "--moduli", "2,5", "neg", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("modulus 2 (5)"));
    let deep = toeplitz(&["odometer", "--moduli", "2,4", "--depth", "3", "neg", "1"]);
    assert_eq!(deep.status.code(), Some(1));
}

#[test]
fn factor_reports_equivariance() {
    let file = data("dyadic.toml");
    let (v, code) = structured(&["factor", file.to_str().unwrap(), "--t-max", "16", "--radius", "1024"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"]["semiconjugacy"], true);
    assert_eq!(v["verdicts"]["partition"], true);
    let addresses = v["results"]["addresses"].as_array().unwrap();
    let of = |label: &str| addresses.iter().find(|a| a["point"] == label).unwrap()["address"].clone();
    assert_eq!(of("S^0"), "(0, 0, 0, 0, 0, 0)");
    assert_eq!(of("S^-1"), "(1, 3, 7, 15, 31, 63)");
}

#[test]
fn verify_passes_on_the_sample_files() {
    for (name, code) in [("dyadic.toml", 0), ("period_doubling.toml", 0), ("fill.toml", 2), ("constant.toml", 2)] {
        let file = data(name);
        let (v, got) = structured(&["verify", file.to_str().unwrap(), "--radius", "2048"]);
        assert_eq!(got, code, "{name}: {v}");
        assert!(v["verdicts"].as_object().unwrap().values().all(|b| b == true), "{name}");
    }
}
