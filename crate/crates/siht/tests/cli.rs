//! End-to-end tests of the command-line interface: flag handling, exit codes,
//! output formats, and file emission.

use std::path::PathBuf;
use std::process::{Command, Output};

fn siht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siht"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("siht-cli-{}-{name}", std::process::id()));
    path
}

#[test]
fn complexity_hand_value_roundtrip() {
    let out = siht(&["complexity", "--m", "4,16,4,16", "--p", "0.25,0.25,0.25,0.25"]);
    let json = stdout_json(&out);
    assert!((json["md"].as_f64().unwrap() - 6.4).abs() < 1e-9);
    assert_eq!(json["s"].as_u64().unwrap(), 4);
    assert!((json["a_m"].as_f64().unwrap() - 10.0).abs() < 1e-12);
    assert!((json["g_m"].as_f64().unwrap() - 8.0).abs() < 1e-9);
}

#[test]
fn complexity_theorem_bound_and_estimate() {
    let out = siht(&[
        "complexity", "--m", "100", "--p", "1.0", "--k", "2", "--n", "50", "--epsilon", "0.5",
        "--c-tilde", "96",
    ]);
    let json = stdout_json(&out);
    assert!(json["theorem"]["satisfied"].is_boolean());

    let out = siht(&["complexity", "--bound-a", "20", "--bound-b", "150"]);
    let json = stdout_json(&out);
    assert!((json["expected_lower_bound"].as_f64().unwrap() - 45000.0 / 1530.0).abs() < 1e-9);

    let out = siht(&[
        "complexity", "--estimate", "--a", "5", "--b", "20", "--s", "10", "--trials", "2000",
        "--seed", "7",
    ]);
    let json = stdout_json(&out);
    assert!(json["estimate"]["mean"].as_f64().unwrap() > 3.5);
}

#[test]
fn complexity_without_request_is_a_usage_error() {
    let out = siht(&["complexity"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recover_identity_is_exact() {
    let out = siht(&[
        "recover", "--ensemble", "identity", "--n", "8", "--k", "2", "--t", "1", "--seed", "1",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["success"].as_bool(), Some(true));
    assert_eq!(json["final_error"].as_f64(), Some(0.0));
    assert_eq!(json["iterations"].as_u64(), Some(1));
    assert_eq!(json["errors"].as_array().unwrap().len(), 2);
}

#[test]
fn recover_stop_at_threshold_reports_fewer_iterations() {
    let out = siht(&[
        "recover", "--ensemble", "identity", "--n", "8", "--k", "2", "--t", "5", "--seed", "1",
        "--stop-at-threshold",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["iterations"].as_u64(), Some(1));
    assert_eq!(json["success"].as_bool(), Some(true));
}

#[test]
fn sweep_requires_a_seed() {
    let out = siht(&["sweep"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--seed"));
    assert!(stderr.contains("USAGE"));
}

#[test]
fn unknown_flags_print_usage() {
    let out = siht(&["sweep", "--seed", "1", "--frobnicate", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("USAGE"));

    let out = siht(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = siht(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("USAGE"));
}

#[test]
fn sweep_writes_csv_and_honors_config_file() {
    let config_path = temp_path("sweep-config.json");
    std::fs::write(
        &config_path,
        r#"{
            "n": 16, "t": 3, "k_grid": [2], "trials": 3, "threshold": 0.001,
            "a": 8, "b": 12, "offline_m": [12], "ensemble": "identity",
            "master_seed": 5, "workers": 1
        }"#,
    )
    .unwrap();
    let out_path = temp_path("sweep.csv");
    let out = siht(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "k,mode,param_a,param_b,param_m,trials,successes,probability,mean_final_error"
    );
    // One K, two modes (siht + one offline baseline).
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,siht,8,12,,3,3,"));
    assert!(lines[2].starts_with("2,offline,,,12,3,3,"));

    // A flag overrides the file: bad sparsity must fail validation.
    let out = siht(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--k-grid",
        "99",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::remove_file(&config_path).ok();
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn malformed_config_is_a_validation_error() {
    let config_path = temp_path("bad-config.json");
    std::fs::write(&config_path, r#"{"unknown_key": 3}"#).unwrap();
    let out = siht(&["sweep", "--seed", "1", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&config_path).ok();

    let out = siht(&["sweep", "--seed", "1", "--config", "/no/such/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phase_diagram_emits_csv_and_pgm() {
    let csv_path = temp_path("pd.csv");
    let pgm_path = temp_path("pd.pgm");
    let out = siht(&[
        "phase-diagram", "--seed", "3", "--n", "16", "--t", "2", "--k", "2", "--trials", "2",
        "--ensemble", "identity", "--a-min", "4", "--a-max", "8", "--a-step", "4", "--b-min",
        "4", "--b-max", "8", "--b-step", "4", "--out", csv_path.to_str().unwrap(), "--pgm",
        pgm_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let pgm = std::fs::read(&pgm_path).unwrap();
    assert!(pgm.starts_with(b"P5\n2 2\n255\n"));
    assert_eq!(pgm.len(), b"P5\n2 2\n255\n".len() + 4);
    // Identity ensemble: valid cells recover always; the a > b cell (a=8,
    // b=4, bottom-right in image order) is black.
    let pixels = &pgm[pgm.len() - 4..];
    assert_eq!(pixels, &[255, 255, 255, 0]);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("a,b,valid,trials,successes,probability\n"));
    assert_eq!(csv.lines().count(), 5);

    std::fs::remove_file(&csv_path).ok();
    std::fs::remove_file(&pgm_path).ok();
}

#[test]
fn ric_reads_csv_matrix() {
    let matrix_path = temp_path("matrix.csv");
    std::fs::write(&matrix_path, "1.0,0.0,0.0\n0.0,1.0,0.0\n0.0,0.0,1.0\n").unwrap();
    let out = siht(&["ric", "--input", matrix_path.to_str().unwrap(), "--order", "2"]);
    let json = stdout_json(&out);
    assert_eq!(json["order"].as_u64(), Some(2));
    assert_eq!(json["value"].as_f64(), Some(0.0));
    assert_eq!(json["witness"].as_array().unwrap().len(), 2);
    std::fs::remove_file(&matrix_path).ok();
}

#[test]
fn ric_missing_file_is_an_io_error() {
    let out = siht(&["ric", "--input", "/no/such/matrix.csv", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ric_malformed_matrix_is_a_validation_error() {
    let matrix_path = temp_path("bad-matrix.csv");
    std::fs::write(&matrix_path, "1.0,0.0\nnot-a-number,1.0\n").unwrap();
    let out = siht(&["ric", "--input", matrix_path.to_str().unwrap(), "--order", "1"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&matrix_path).ok();
}
