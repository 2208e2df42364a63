use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const TOP_WORDS: &str = "# word\tcount\nthe\t6187267\nbe\t4239632\nof\t3093444\nand\t2687863\na\t2186369\nin\t1924315\nto\t1620850\nhave\t1375636\nit\t1090186\nto\t1039323\n";

fn zipfpoi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zipfpoi"))
        .args(args)
        .output()
        .unwrap()
}

fn zipfpoi_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zipfpoi"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn keys(v: &Value) -> BTreeSet<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn set<'a>(names: &[&'a str]) -> BTreeSet<&'a str> {
    names.iter().copied().collect()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("zipfpoi-cli-{}-{name}", std::process::id()))
}

/// A Zipf table long enough for the default 10..100 window.
fn zipf_table() -> String {
    (1..=400)
        .map(|i| format!("w{i},{}\n", (1e7 * (i as f64).powf(-1.106)).round()))
        .collect()
}

#[test]
fn threshold_report() {
    let v = json(&zipfpoi(&["threshold", "--N", "1e7", "--alpha", "1.106"]));
    assert_eq!(
        keys(&v),
        set(&["A_const", "n_prime", "n_prime_floor", "inputs", "log_N"])
    );
    assert_eq!(keys(&v["inputs"]), set(&["N", "alpha", "k"]));
    assert!((v["n_prime"].as_f64().unwrap() - 72.08).abs() < 0.01);
    assert_eq!(v["n_prime_floor"], 72);
}

#[test]
fn bound_report() {
    let v = json(&zipfpoi(&[
        "bound", "--N", "1e7", "--alpha", "1.106", "--n", "72",
    ]));
    assert_eq!(
        keys(&v),
        set(&[
            "n",
            "per_pair_terms",
            "bonferroni_sum",
            "clamped_probability"
        ])
    );
    assert_eq!(v["per_pair_terms"].as_array().unwrap().len(), 71);
    assert!((v["bonferroni_sum"].as_f64().unwrap() - 0.0199).abs() < 1e-4);
}

#[test]
fn pick_n_report() {
    let v = json(&zipfpoi(&[
        "pick-n",
        "--N",
        "1e7",
        "--alpha",
        "1.106",
        "--epsilon",
        "0.01",
    ]));
    assert_eq!(keys(&v), set(&["n", "bound_at_n", "cap_reached"]));
    // p(70) = 0.0112 already exceeds 1%
    assert_eq!(v["n"], 69);
    let v = json(&zipfpoi(&[
        "pick-n",
        "--N",
        "1e7",
        "--alpha",
        "1.106",
        "--epsilon",
        "0.05",
    ]));
    assert_eq!(v["n"], 75);
}

#[test]
fn csv_output() {
    let out = zipfpoi(&[
        "pick-n", "--N", "1e7", "--alpha", "1.106", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,bound_at_n,cap_reached\n69,"), "{text}");
    let out = zipfpoi(&[
        "bound", "--N", "1e7", "--alpha", "1.106", "--n", "4", "--format", "csv",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn simulate_is_byte_identical() {
    let args = [
        "simulate", "--N", "1e7", "--alpha", "1.106", "--reps", "10", "--seed", "42",
    ];
    let a = zipfpoi(&args);
    let b = zipfpoi(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "4"]);
    assert_eq!(a.stdout, zipfpoi(&threaded).stdout);
    let v = json(&a);
    assert_eq!(
        keys(&v),
        set(&[
            "params",
            "reps",
            "n_focus",
            "seed",
            "truncation_m",
            "histogram",
            "error_kind_counts",
            "jump_offsets"
        ])
    );
    assert_eq!(v["reps"], 10);
    assert_eq!(v["n_focus"], 73);
}

#[test]
fn simulate_writes_output_file() {
    let path = scratch("sim.json");
    let out = zipfpoi(&[
        "simulate",
        "--N",
        "1e5",
        "--alpha",
        "1.3",
        "--reps",
        "1e2",
        "--seed",
        "7",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["reps"], 100);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn analyze_from_stdin_with_tables() {
    let zipf = scratch("zipf.csv");
    let se = scratch("se.csv");
    let out = zipfpoi_stdin(
        &[
            "analyze",
            "--input",
            "-",
            "--input-format",
            "csv",
            "--alpha",
            "1.106",
            "--total",
            "1e8",
            "--zipf-csv",
            zipf.to_str().unwrap(),
            "--se-csv",
            se.to_str().unwrap(),
        ],
        &zipf_table(),
    );
    let v = json(&out);
    assert_eq!(
        keys(&v),
        set(&[
            "counts_summary",
            "params_used",
            "window",
            "epsilon",
            "n_prime",
            "n_hat",
            "pick_n_result",
            "pick_n_bound",
            "pick_n_cap_reached",
            "local_scale",
            "n_prime_local",
            "adjacent_se",
            "zipf_points",
            "reference_slopes",
            "reference_lines",
            "sensitivity",
        ])
    );
    assert_eq!(v["adjacent_se"].as_array().unwrap().len(), 399);
    assert_eq!(v["counts_summary"]["top10"].as_array().unwrap().len(), 10);
    assert!((v["n_hat"].as_f64().unwrap() - 72.04).abs() < 0.2);
    let zipf_text = std::fs::read_to_string(&zipf).unwrap();
    assert!(zipf_text.starts_with("i,ln_rank,ln_count\n"));
    assert_eq!(zipf_text.lines().count(), 401);
    assert!(std::fs::read_to_string(&se)
        .unwrap()
        .starts_with("i,se\n1,"));
    std::fs::remove_file(zipf).unwrap();
    std::fs::remove_file(se).unwrap();
}

#[test]
fn analyze_short_table_needs_smaller_window() {
    let out = zipfpoi_stdin(&["analyze", "--input", "-", "--alpha", "1.106"], TOP_WORDS);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
    let v = json(&zipfpoi_stdin(
        &[
            "analyze", "--input", "-", "--alpha", "1.106", "--lo", "2", "--hi", "10", "--total",
            "1e8",
        ],
        TOP_WORDS,
    ));
    assert!((v["adjacent_se"][8].as_f64().unwrap() - 34.9).abs() < 0.1);
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(
        zipfpoi(&["threshold", "--alpha", "1.1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        zipfpoi(&["threshold", "--N", "1e7", "--alpha", "1.1", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zipfpoi(&["simulate", "--N", "1e7", "--alpha", "1.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zipfpoi(&["bound", "--N", "1e7", "--alpha", "1.1", "--n", "2.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(zipfpoi(&["frobnicate"]).status.code(), Some(2));
    // domain errors
    assert_eq!(
        zipfpoi(&["threshold", "--N", "1e7", "--alpha", "0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        zipfpoi(&["pick-n", "--N", "1e7", "--alpha", "1.1", "--epsilon", "2"])
            .status
            .code(),
        Some(1)
    );
    let bad = zipfpoi_stdin(
        &["analyze", "--input", "-", "--alpha", "1.1"],
        "a\t5\nb\tmany\n",
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 2"));
    let missing = zipfpoi(&[
        "analyze",
        "--input",
        "/nonexistent/table.tsv",
        "--alpha",
        "1.1",
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn help_documents_every_flag() {
    let expected: [(&str, &[&str]); 5] = [
        ("threshold", &["--N", "--alpha", "--output", "--format"]),
        (
            "bound",
            &["--N", "--alpha", "--k", "--n", "--output", "--format"],
        ),
        (
            "pick-n",
            &[
                "--N",
                "--alpha",
                "--k",
                "--epsilon",
                "--n-max",
                "--output",
                "--format",
            ],
        ),
        (
            "simulate",
            &[
                "--N",
                "--alpha",
                "--k",
                "--reps",
                "--seed",
                "--n-focus",
                "--threads",
                "--output",
                "--format",
            ],
        ),
        (
            "analyze",
            &[
                "--input",
                "--input-format",
                "--alpha",
                "--k",
                "--total",
                "--lo",
                "--hi",
                "--epsilon",
                "--n-max",
                "--zipf-csv",
                "--se-csv",
                "--output",
            ],
        ),
    ];
    for (sub, flags) in expected {
        let out = zipfpoi(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in flags {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
    assert_eq!(zipfpoi(&["--help"]).status.code(), Some(0));
}
