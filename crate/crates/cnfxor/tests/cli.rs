//! End-to-end checks of the command-line interface and its exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cnfxor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnfxor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

#[test]
fn gen_is_byte_deterministic() {
    let args = ["gen", "-k", "3", "-n", "50", "-r", "2", "-s", "0.5", "-p", "0.5", "--seed", "7"];
    let first = cnfxor(&args);
    let second = cnfxor(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("p cnf 50 125\n"), "header: {}", text.lines().next().unwrap());

    let different = cnfxor(&["gen", "-k", "3", "-n", "50", "-r", "2", "-s", "0.5", "--seed", "8"]);
    assert_ne!(first.stdout, different.stdout);
}

#[test]
fn theory_parity_prints_expected_value() {
    let output = cnfxor(&["theory", "parity", "-p", "0.1", "-N", "3"]);
    assert!(output.status.success());
    assert_eq!(stdout(&output).trim(), "0.756");
}

#[test]
fn solve_exit_codes_encode_status() {
    let dir = tempdir();
    let unsat = dir.join("unsat.cnf");
    // Three XOR rows summing to 0 = 1.
    std::fs::write(&unsat, "p cnf 3 3\nx -1 2 0\nx -2 3 0\nx 1 3 0\n").unwrap();
    let output = cnfxor(&["solve", unsat.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(20), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("\"UNSAT\""));

    let sat = dir.join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\n1 2 0\nx 1 2 0\n").unwrap();
    let output = cnfxor(&["solve", sat.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(10));
    assert!(stdout(&output).contains("\"SAT\""));
}

#[test]
fn solve_on_sampled_formula_verifies_round_trip() {
    let dir = tempdir();
    let path = dir.join("gen.cnf");
    let generated = cnfxor(&[
        "gen", "-n", "12", "-r", "1.5", "-s", "0.3", "--seed", "5", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(generated.status.success());
    let from_file = cnfxor(&["solve", path.to_str().unwrap()]);
    let from_params = cnfxor(&["solve", "-n", "12", "-r", "1.5", "-s", "0.3", "--seed", "5"]);
    assert_eq!(from_file.status.code(), from_params.status.code());
}

#[test]
fn usage_errors_exit_one() {
    let output = cnfxor(&["solve"]);
    assert_eq!(output.status.code(), Some(1));
    let output = cnfxor(&["gen", "--not-a-flag"]);
    assert_eq!(output.status.code(), Some(1));
    let output = cnfxor(&["theory", "entropy", "-x", "1.5"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn capacity_errors_exit_two() {
    let output = cnfxor(&["enumerate", "-n", "31"]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    // 2^10 solutions of the empty formula exceed a cap of 5.
    let output = cnfxor(&["enumerate", "-n", "10", "--cap", "5"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn scale_csv_and_fit_pipeline() {
    let dir = tempdir();
    let csv_path = dir.join("points.csv");
    let output = cnfxor(&[
        "scale", "-r", "0", "-s", "0", "--n-grid", "8,10,12,14,16", "--trials", "2",
        "--format", "csv", "--out", csv_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let fitted = cnfxor(&["fit", csv_path.to_str().unwrap()]);
    assert!(fitted.status.success(), "stderr: {}", stderr(&fitted));
    assert!(stdout(&fitted).contains("\"selected\""));
}

#[test]
fn fit_recovers_synthetic_linear_csv() {
    let dir = tempdir();
    let path = dir.join("linear.csv");
    let mut text = String::from("n,median\n");
    for n in (10..=50).step_by(10) {
        text.push_str(&format!("{n},{}\n", 3 * n + 2));
    }
    std::fs::write(&path, text).unwrap();
    let output = cnfxor(&["fit", path.to_str().unwrap()]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("\"selected\": \"linear\""));
}

#[test]
fn transition_reports_crossing_for_pure_xor() {
    let output = cnfxor(&[
        "transition", "--sweep", "s", "--from", "0.5", "--to", "1.3", "--step", "0.2",
        "-n", "24", "-r", "0", "--trials", "30", "--seed", "9",
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let crossing = doc["estimate"]["crossing"].as_f64().expect("crossing present");
    assert!(crossing > 0.5 && crossing < 1.3, "crossing {crossing}");
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cnfxor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}
