//! End-to-end tests that drive the compiled binary the way a user would:
//! fixtures in, verdicts and files out, exit codes checked.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lumpsys"))
        .args(args)
        .output()
        .expect("failed to launch lumpsys")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is not UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is not UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process was killed by a signal")
}

fn json_report(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("stdout is not valid JSON")
}

#[test]
fn gen_chain_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain6.json");
    let out = run(&["gen-chain", "6", "1.0", "--out", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("wrote 6-species chain (k = 1)"));

    let golden = std::fs::read(fixture("chain6_golden.json")).unwrap();
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, golden, "generated chain drifted from the golden file");

    // Without --out the same bytes go to stdout.
    let printed = run(&["gen-chain", "6", "1.0"]);
    assert_eq!(exit_code(&printed), 0);
    assert_eq!(printed.stdout, golden);
}

#[test]
fn gen_chain_writes_the_reaction_network() {
    let dir = tempfile::tempdir().unwrap();
    let sys_path = dir.path().join("chain4.json");
    let net_path = dir.path().join("chain4_net.json");
    let out = run(&[
        "gen-chain",
        "4",
        "0.5",
        "--out",
        sys_path.to_str().unwrap(),
        "--network-out",
        net_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let net: Value = serde_json::from_str(&std::fs::read_to_string(&net_path).unwrap()).unwrap();
    assert_eq!(net["species"], serde_json::json!(["X1", "X2", "X3", "X4"]));
    let reactions = net["reactions"].as_array().unwrap();
    assert_eq!(reactions.len(), 6);
    for r in reactions {
        assert_eq!(r["rate"], serde_json::json!(0.5));
    }
}

#[test]
fn analyze_prints_rank_verdicts() {
    let out = run(&["analyze", fixture("chain3_partial_input.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("system: 3 states, 3 inputs, 3 outputs"));
    assert!(text.contains("controllable: no (rank 2/3"));
    assert!(text.contains("observable: yes (rank 3/3"));
}

#[test]
fn analyze_distinguishes_the_observation_fixtures() {
    let pair = run(&["analyze", fixture("chain3_pair_observed.json").to_str().unwrap()]);
    assert!(stdout(&pair).contains("observable: yes (rank 3/3"));

    let coarse = run(&["analyze", fixture("chain3_lump_observed.json").to_str().unwrap()]);
    assert!(stdout(&coarse).contains("observable: no (rank 2/3"));

    let dead = run(&["analyze", fixture("chain3_zero_input.json").to_str().unwrap()]);
    assert!(stdout(&dead).contains("controllable: no (rank 0/3"));
}

#[test]
fn analyze_json_report_has_the_full_structure() {
    let out = run(&[
        "analyze",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json_report(&out);
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["inputs"]["n"], 3);
    let ctrl = &report["results"]["controllability"];
    assert_eq!(ctrl["verdict"], true);
    assert_eq!(ctrl["rank"], 3);
    assert_eq!(ctrl["test_matrix_cols"], 9);
    assert_eq!(ctrl["singular_values"].as_array().unwrap().len(), 3);
    assert!(ctrl["tolerance_used"].as_f64().unwrap() > 0.0);
    assert_eq!(report["results"]["observability"]["verdict"], true);
    assert!(report["tolerances"]["rank_rel_tol"].is_null());
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["analyze", "no_such_system.json"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("error:"));
    assert!(stderr(&out).contains("no_such_system.json"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"n\": 3, ").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn lump_prints_the_human_summary() {
    let out = run(&[
        "lump",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--m-file",
        fixture("m_chain3_standard.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("lumping: 2 x 3"));
    assert!(text.contains("kinetic: yes (pivot columns 1, 3)"));
    assert!(text.contains("original: controllable: yes (rank 3/3"));
    assert!(text.contains("lumped: controllable: yes (rank 2/2"));
    assert!(text.contains("preservation: consistent"));
}

#[test]
fn lump_json_report_matches_the_written_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lumped.json");
    let out = run(&[
        "lump",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--m-file",
        fixture("m_chain3_standard.json").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json_report(&out);
    assert_eq!(report["command"], "lump");
    assert!(report["results"]["residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["results"]["kinetic"]["kind"], "kinetic");
    assert_eq!(report["results"]["preservation"]["consistent"], true);
    assert_eq!(report["tolerances"]["exactness_tol"], serde_json::json!(1e-9));

    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["n"], 2);
    assert_eq!(written["r"], 3);
    assert_eq!(written["p"], 3);
    // The file must reparse to the exact floats the report carries.
    assert_eq!(written["A"], report["results"]["a_hat"]);
}

#[test]
fn eigenvector_mixing_reproduces_the_standard_lumping() {
    let out = run(&[
        "lump",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--eigvecs",
        "3,2",
        "--mix",
        "1,1,1,-1",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json_report(&out);
    let a_hat = report["results"]["a_hat"].as_array().unwrap();
    let expected = [[-0.5, 0.5], [0.5, -0.5]];
    for (i, row) in a_hat.iter().enumerate() {
        for (j, entry) in row.as_array().unwrap().iter().enumerate() {
            let got = entry.as_f64().unwrap();
            assert!(
                (got - expected[i][j]).abs() < 1e-12,
                "a_hat[{i}][{j}] = {got}"
            );
        }
    }
}

#[test]
fn eigvec_indices_are_one_based() {
    let out = run(&[
        "lump",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--eigvecs",
        "0,1",
        "--mix",
        "1,0,0,1",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("1-based"));
}

#[test]
fn lump_without_a_matrix_source_is_an_input_error() {
    let out = run(&["lump", fixture("chain3_identity_input.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--m-file or --eigvecs"));
}

#[test]
fn truncation_is_rejected_as_not_lumpable() {
    let out = run(&[
        "lump",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--m-file",
        fixture("m_truncation.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    let err = stderr(&out);
    assert!(err.contains("not exactly lumpable"), "stderr: {err}");
    assert!(err.contains("residual"), "stderr: {err}");
}

#[test]
fn mmatrix_classifies_the_chain_and_rejects_positive_diagonals() {
    let chain = run(&[
        "mmatrix",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--s",
        "2.0",
    ]);
    assert_eq!(exit_code(&chain), 0);
    let text = stdout(&chain);
    assert!(text.contains("splitting: A = -s(I - T) with s = 2"));
    assert!(text.contains("T: nonnegative yes, symmetric yes, irreducible yes"));
    assert!(text.contains("classification: singular M-matrix"));

    let identity = run(&["mmatrix", fixture("identity_a.json").to_str().unwrap()]);
    assert_eq!(exit_code(&identity), 0);
    assert!(stdout(&identity).contains("classification: not applicable"));
}

#[test]
fn simulate_streams_csv_and_conserves_chain_mass() {
    let out = run(&[
        "simulate",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--x0",
        "1,0,0",
        "--t",
        "1.0",
        "--dt",
        "0.01",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,x3");
    assert_eq!(lines.len(), 102);

    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[0] - 1.0).abs() < 1e-12, "grid must end at t exactly");
    let mass: f64 = last[1..].iter().sum();
    assert!((mass - 1.0).abs() < 1e-9, "zero-input chain leaks mass: {mass}");
}

#[test]
fn simulate_with_a_pulse_writes_the_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = run(&[
        "simulate",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--x0",
        "0,0,0",
        "--t",
        "1.0",
        "--dt",
        "0.01",
        "--u-file",
        fixture("u_pulse.json").to_str().unwrap(),
        "--out-csv",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json_report(&out);
    assert_eq!(report["command"], "simulate");
    assert_eq!(report["results"]["rows"], 101);
    let final_state = report["results"]["final_state"].as_array().unwrap();
    assert_eq!(final_state.len(), 3);
    // The pulse injects and then withdraws through x1; the net near zero but
    // the trajectory itself is not.
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("t,x1,x2,x3\n"));
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn simulate_json_to_stdout_needs_a_csv_sink() {
    let out = run(&[
        "simulate",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--x0",
        "1,0,0",
        "--t",
        "1.0",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--out-csv"));
}

#[test]
fn steer_reaches_the_target_and_writes_the_control() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("control.json");
    let out = run(&[
        "steer",
        fixture("chain3_identity_input.json").to_str().unwrap(),
        "--x0",
        "1,0,0",
        "--x1",
        "0,0,1",
        "--t1",
        "1.0",
        "--steps",
        "400",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report = json_report(&out);
    assert_eq!(report["results"]["segments"], 400);
    assert!(report["results"]["endpoint_error_relative"].as_f64().unwrap() < 1e-3);

    let control: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(control["type"], "piecewise");
    assert_eq!(control["times"].as_array().unwrap().len(), 401);
    assert_eq!(control["values"].as_array().unwrap().len(), 400);
}

#[test]
fn steer_refuses_an_uncontrollable_system() {
    let out = run(&[
        "steer",
        fixture("chain3_partial_input.json").to_str().unwrap(),
        "--x0",
        "1,0,0",
        "--x1",
        "0,0,1",
        "--t1",
        "1.0",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("rank 2/3"), "stderr: {}", stderr(&out));
}

#[test]
fn verify_reports_the_one_way_implication() {
    let out = run(&[
        "verify",
        fixture("chain3_partial_input.json").to_str().unwrap(),
        "--m-file",
        fixture("m_chain3_standard.json").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("original: controllable: no (rank 2/3"));
    assert!(text.contains("lumped: controllable: yes (rank 2/2"));
    assert!(text.contains("preservation: consistent"));
}

#[test]
fn loose_rank_tolerance_keeps_the_verdicts() {
    let out = run(&[
        "analyze",
        fixture("chain3_partial_input.json").to_str().unwrap(),
        "--tol",
        "1e-3",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("controllable: no (rank 2/3"));
    assert!(text.contains("observable: yes (rank 3/3"));
}
