//! End-to-end tests of the command-line interface: config handling, exit
//! codes, and the JSON/CSV artifacts of every subcommand.

use std::path::Path;
use std::process::{Command, Output};

fn surfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        serde_json::json!({
            "d_list": [3],
            "p_list": [0.02],
            "q_equals_p": true,
            "shots_noiseless": 30,
            "resamples_readout": 4,
            "shots_incoherent": 200,
            "master_seed": 7,
        })
        .to_string(),
    )
    .unwrap();
    path
}

#[test]
fn simulate_writes_csv_and_manifest_and_honors_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out_dir = dir.path().join("results");
    let output = surfsim(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "99",
        "--workers",
        "2",
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header + one row");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 99, "--seed override reaches the manifest");
    assert_eq!(manifest["config"]["workers"], 2);
}

#[test]
fn bad_config_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // Both rate parameterizations at once: structurally valid JSON,
    // semantically rejected.
    std::fs::write(
        &path,
        serde_json::json!({
            "d_list": [3],
            "p_list": [0.02],
            "theta_list": [0.1],
            "q_equals_p": true,
            "shots_noiseless": 10,
            "resamples_readout": 2,
            "master_seed": 1,
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let output = surfsim(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("configuration error"));
}

#[test]
fn missing_config_file_exits_with_code_one() {
    let output = surfsim(&["simulate", "--config", "/nonexistent/nope.json"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn unknown_flag_exits_with_code_one() {
    let output = surfsim(&["simulate", "--frobnicate"]);
    assert_eq!(output.status.code(), Some(1));
}

/// Synthetic sweep CSV drawn exactly from the scaling ansatz
/// v = A + Bx + Cx², x = (p − 0.025)·d, with matching diamond data.
fn write_synthetic_csv(path: &Path) {
    let header = "d,p,q,theta,shots,resamples,pli,pli_err,pld,pld_err,twirl_i,twirl_d,coh_ratio,coh_ratio_err";
    let mut text = String::from(header);
    text.push('\n');
    let (p_th, a, b, c) = (0.025, 0.1, 2.0, 6.0);
    for d in [3usize, 5, 7, 9, 11] {
        for i in 0..9 {
            let p = 0.015 + 0.0025 * i as f64;
            let x = (p - p_th) * d as f64;
            let pli: f64 = a + b * x + c * x * x;
            let pld = 2.5 * pli;
            text.push_str(&format!(
                "{d},{p},0.01,0.1,1000,20,{pli},0.001,{pld},0.002,1.1,1.2,1.3,0.05\n"
            ));
        }
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn threshold_fit_recovers_the_synthetic_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    write_synthetic_csv(&csv);
    let report_path = dir.path().join("fit.json");
    let output = surfsim(&[
        "threshold-fit",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let p_th = report["p_th"].as_f64().unwrap();
    assert!((p_th - 0.025).abs() < 1e-4, "p_th = {p_th}");
    assert_eq!(report["covariance"].as_array().unwrap().len(), 5);
}

#[test]
fn diamond_analysis_reports_crossings_and_intercept() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    write_synthetic_csv(&csv);
    let output = surfsim(&["diamond-analysis", "--input", csv.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    // The synthetic curves all cross at p_th, so the extrapolation lands there.
    let intercept = report["intercept_at_infinite_d"].as_f64().unwrap();
    assert!((intercept - 0.025).abs() < 1e-6, "intercept = {intercept}");
    assert_eq!(report["crossings"].as_array().unwrap().len(), 4);
}

#[test]
fn threshold_map_brackets_the_synthetic_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    write_synthetic_csv(&csv);
    let output = surfsim(&["threshold-map", "--input", csv.to_str().unwrap()]);
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    let brackets = report.as_array().unwrap();
    assert_eq!(brackets.len(), 1, "one readout rate in the grid");
    let (lower, upper) = (
        brackets[0]["lower"].as_f64().unwrap(),
        brackets[0]["upper"].as_f64().unwrap(),
    );
    assert!(lower < 0.025 && 0.025 < upper, "bracket [{lower}, {upper}]");
}

#[test]
fn validate_passes_and_prints_the_table() {
    let output = surfsim(&["validate", "--seed", "2024"]);
    assert!(
        output.status.success(),
        "stderr: {}\nstdout: {}",
        String::from_utf8_lossy(&output.stderr),
        String::from_utf8_lossy(&output.stdout)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(stdout.matches(" pass ").count(), 4, "table:\n{stdout}");
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn dump_lattice_emits_the_geometry() {
    let output = surfsim(&["dump-lattice", "--d", "3"]);
    assert!(output.status.success());
    let dump: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(dump["d"], 3);
    assert_eq!(dump["qubits"].as_array().unwrap().len(), 9);
    assert_eq!(dump["x_faces"].as_array().unwrap().len(), 4);
    assert_eq!(dump["z_faces"].as_array().unwrap().len(), 4);
    assert_eq!(dump["majorana"]["count"], 36, "four Majorana modes per qubit");

    let output = surfsim(&["dump-lattice", "--d", "4"]);
    assert_eq!(output.status.code(), Some(1), "even distance rejected");
}
