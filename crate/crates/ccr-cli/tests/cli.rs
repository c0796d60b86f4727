//! End-to-end tests of the ccr binary: exit codes, output formats,
//! byte stability, and arbitrary inequality files.

use std::path::PathBuf;
use std::process::{Command, Output};

use ccr_core::inequality::build_pentagon_inequality;
use ccr_core::io::from_json_str;

const BIN: &str = env!("CARGO_BIN_EXE_ccr");

fn ccr(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CCR_THREADS")
        .output()
        .expect("binary runs")
}

fn ccr_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CCR_THREADS")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("ccr-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("write temp file");
    path
}

const CHSH_JSON: &str = r#"{
  "parties": 2,
  "settings": [2, 2],
  "terms": [
    {"x": [1, 1], "num": 1, "den": 4},
    {"x": [1, 2], "num": 1, "den": 4},
    {"x": [2, 1], "num": 1, "den": 4},
    {"x": [2, 2], "num": -1, "den": 4}
  ]
}
"#;

#[test]
fn verify_bundled_inequality_passes() {
    let out = ccr(&["verify", "--threads", "2"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 0, "stdout: {text}");
    assert!(text.contains("PASS bound-claim"));
    assert!(text.contains("PASS monte-carlo"));
    assert!(text.contains("0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_exit_codes_for_bad_files() {
    let wrong_bound = temp_file(
        "wrong-bound.json",
        r#"{
  "parties": 2,
  "settings": [1, 1],
  "bound": {"num": 2, "den": 1},
  "terms": [{"x": [1, 1], "num": 1, "den": 2}]
}
"#,
    );
    let out = ccr(&["verify", "--ineq", wrong_bound.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL bound-claim"));

    let malformed = temp_file("malformed.json", "{ \"parties\": 2, \"settings\": [");
    let out = ccr(&["verify", "--ineq", malformed.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let missing = std::env::temp_dir().join("ccr-no-such-file.json");
    let out = ccr(&["bound", "--ineq", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bound_prints_exact_rational() {
    let out = ccr(&["bound"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("1/1"), "stdout: {text}");

    let out = ccr(&["bound", "--format", "json"]);
    let payload: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(payload["bound"], "1/1");
}

#[test]
fn quantum_reports_frozen_spectrum() {
    let out = ccr(&["quantum"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("quantum value: 1.80858808853"));
    assert!(text.contains("multiplicity: 2"));
    assert!(text.contains("analytic success rate: 0.620572539235"));
    assert!(text.contains("closed form: 1.80858808853"));

    let swapped = ccr(&["quantum", "--assign", "z,x"]);
    assert!(stdout(&swapped).contains("quantum value: 1.80858808853"));
}

#[test]
fn strategies_reports_optimum_and_witness() {
    let out = ccr(&["strategies"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("best success rate: 17/30"));
    assert!(text.contains("optimal strategies: 15360"));
    assert!(text.contains("witness: +++,+++,+++,+++,++-"));
    assert_eq!(text.matches(": 1/2").count(), 8);

    let out = ccr(&["strategies", "--strategy", "+++,+++,+++,+++,-+-"]);
    assert!(stdout(&out).contains("strategy +++,+++,+++,+++,-+-: 17/30"));

    let out = ccr(&["strategies", "--strategy", "+++,zz"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_text_report_has_all_fields() {
    let out = ccr(&["simulate", "--trials", "2000", "--seed", "9", "--threads", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for field in [
        "mode: quantum-product",
        "trials: 2000",
        "seed: 9",
        "successes: ",
        "empirical rate: ",
        "std error: ",
        "analytic rate: 0.620572539235",
    ] {
        assert!(text.contains(field), "missing '{field}' in: {text}");
    }
}

#[test]
fn simulate_json_output_is_byte_stable() {
    let args = [
        "simulate", "--trials", "2000", "--seed", "9", "--format", "json", "--threads", "2",
    ];
    let first = ccr(&args);
    let second = ccr(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    // thread count must not change the bytes
    let mut args_one_thread = args.to_vec();
    args_one_thread[8] = "1";
    let third = ccr(&args_one_thread);
    assert_eq!(first.stdout, third.stdout);

    let payload: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(payload["trials"], 2000);
    assert_eq!(payload["mode"], "quantum-product");
    assert!(payload["empirical_rate"].is_f64());
}

#[test]
fn simulate_classical_defaults_to_best_strategy() {
    let out = ccr(&[
        "simulate", "--mode", "classical", "--trials", "1000", "--seed", "4",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("analytic rate: 0.566666666667"));

    let out = ccr(&[
        "simulate",
        "--mode",
        "classical",
        "--trials",
        "1000",
        "--seed",
        "4",
        "--strategy",
        "+++,+++,+++,+++,-+-",
    ]);
    assert!(stdout(&out).contains("analytic rate: 0.566666666667"));
}

#[test]
fn simulate_csv_streams_reproducible_rounds() {
    let args = [
        "simulate", "--trials", "6", "--seed", "3", "--format", "csv",
    ];
    let first = ccr(&args);
    assert_eq!(code(&first), 0);
    let text = stdout(&first);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,x,y,messages,answer,target,success");
    assert_eq!(lines.len(), 7);
    for (i, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], i.to_string());
        assert_eq!(fields[1].len(), 5);
        assert_eq!(fields[2].len(), 5);
        assert_eq!(fields[3].len(), 5);
        assert!(fields[4] == "1" || fields[4] == "-1");
        assert!(fields[5] == "1" || fields[5] == "-1");
        assert!(fields[6] == "0" || fields[6] == "1");
        let success = (fields[4] == fields[5]) as u8;
        assert_eq!(fields[6], success.to_string());
    }

    let second = ccr(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn export_round_trips_through_parser() {
    let out = ccr(&["export"]);
    assert_eq!(code(&out), 0);
    let parsed = from_json_str(&stdout(&out)).unwrap();
    assert_eq!(parsed, build_pentagon_inequality());
}

#[test]
fn export_includes_computed_bound_for_foreign_files() {
    let chsh = temp_file("chsh.json", CHSH_JSON);
    let out = ccr(&["export", "--ineq", chsh.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"bound\": {\"num\": 1, \"den\": 2}"));
}

#[test]
fn arbitrary_inequality_files_are_honored_everywhere() {
    let chsh = temp_file("chsh-all.json", CHSH_JSON);
    let path = chsh.to_str().unwrap();

    let out = ccr(&["bound", "--ineq", path]);
    assert!(stdout(&out).contains("1/2"));

    let out = ccr(&["quantum", "--ineq", path]);
    let text = stdout(&out);
    assert!(text.contains("quantum value: 0.707106781187"), "{text}");
    assert!(!text.contains("closed form"));

    let out = ccr(&["simulate", "--ineq", path, "--trials", "500", "--seed", "2"]);
    assert!(stdout(&out).contains("analytic rate: 0.853553390593"));

    let out = ccr(&["strategies", "--ineq", path]);
    assert_eq!(code(&out), 0);
}

#[test]
fn ccr_threads_env_is_a_fallback() {
    let flag = ccr(&[
        "simulate", "--trials", "900", "--seed", "5", "--format", "json", "--threads", "2",
    ]);
    let env = ccr_env(
        &["simulate", "--trials", "900", "--seed", "5", "--format", "json"],
        "CCR_THREADS",
        "2",
    );
    assert_eq!(flag.stdout, env.stdout);

    let bad = ccr_env(
        &["simulate", "--trials", "10", "--seed", "5"],
        "CCR_THREADS",
        "lots",
    );
    assert_eq!(code(&bad), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ccr(&["frobnicate"])), 2);
    assert_eq!(code(&ccr(&["simulate", "--mode", "psychic"])), 2);
    assert_eq!(code(&ccr(&["simulate", "--trials", "0"])), 2);
    assert_eq!(code(&ccr(&["simulate", "--strategy", "+++,+++,+++,+++,+++"])), 2);
    assert_eq!(
        code(&ccr(&[
            "simulate", "--mode", "classical", "--assign", "z,x"
        ])),
        2
    );
    assert_eq!(code(&ccr(&["--help"])), 0);
}
