//! Binary-level contract tests: exit codes, output embedding, flag/config
//! merging, and round-trip stability of the emitted configuration.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trie-motifs"))
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("trie-motifs-bin-test");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn analyze_dna_pair_reproduces_the_reference_numbers() {
    let out = temp_path("dna.json");
    let status = bin()
        .args(["analyze", "--probs", "0.15,0.35,0.35,0.15"])
        .args(["--motif", "((LELL)EEL)", "--motif", "(LE(ELLE)L)"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let value = read_json(&out);
    let report = &value["report"];
    let mean_left = report["mean_coeffs"][0].as_f64().unwrap();
    let mean_right = report["mean_coeffs"][1].as_f64().unwrap();
    let cov = report["cov_coeffs"][0]["coeff"].as_f64().unwrap();
    assert!(
        (mean_left - 0.000006115).abs() < 5e-9,
        "mean_left {mean_left}"
    );
    assert!(
        (mean_right - 0.000517849).abs() < 5e-9,
        "mean_right {mean_right}"
    );
    assert!((cov - -1.56934066e-8).abs() < 1e-12, "cov {cov}");
    // Probabilities echo at 10 significant digits, reals at 12.
    assert_eq!(value["config"]["probs"][0], serde_json::json!(0.15));
    assert_eq!(
        value["version"].as_str().unwrap(),
        env!("CARGO_PKG_VERSION")
    );
}

#[test]
fn analyze_unbiased_cherry_mean_is_one_over_four_ln_two() {
    let out = temp_path("cherry.json");
    let status = bin()
        .args(["analyze", "--probs", "0.5,0.5", "--motif", "(LL)"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let mean = read_json(&out)["report"]["mean_coeffs"][0]
        .as_f64()
        .unwrap();
    assert!((mean - 1.0 / (4.0 * std::f64::consts::LN_2)).abs() < 1e-11);
}

#[test]
fn malformed_motif_exits_two_with_the_parse_offset() {
    let output = bin()
        .args(["analyze", "--probs", "0.5,0.5", "--motif", "(L?)"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = stderr_of(&output);
    assert!(stderr.contains("parse error at byte 2"), "stderr: {stderr}");
}

#[test]
fn oracle_exit_codes_follow_the_contract() {
    let ok = bin()
        .args([
            "oracle", "--probs", "0.5,0.5", "--motif", "(LL)", "--n", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let over = bin()
        .args([
            "oracle", "--probs", "0.5,0.5", "--motif", "(LL)", "--n", "13",
        ])
        .output()
        .unwrap();
    assert_eq!(over.status.code(), Some(3));
    assert!(stderr_of(&over).contains("n <= 12"));

    let raised = bin()
        .args([
            "oracle", "--probs", "0.5,0.5", "--motif", "(LL)", "--n", "13",
        ])
        .args(["--n-max", "14"])
        .output()
        .unwrap();
    assert_eq!(raised.status.code(), Some(0));
}

#[test]
fn cousins_rejects_tau_below_two() {
    let output = bin()
        .args(["cousins", "--tau", "1", "--m", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("tau"));
}

#[test]
fn validate_exit_reflects_the_report() {
    let ok = bin()
        .args(["validate", "--motif", "((LL)L)", "--motif", "(L(LL))"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    // A duplicated motif overlaps itself, and the violation names the pair.
    let dup = bin()
        .args(["validate", "--motif", "(LL)", "--motif", "(LL)"])
        .output()
        .unwrap();
    assert_eq!(dup.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&dup.stdout).into_owned();
    assert!(stdout.contains("\"pass\": false"), "stdout: {stdout}");
}

#[test]
fn missing_config_file_exits_two() {
    let output = bin()
        .args(["analyze", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn config_referencing_a_missing_collection_exits_two() {
    let config = temp_path("bad_collection.json");
    std::fs::write(
        &config,
        r#"{"probs": [0.5, 0.5], "collection": "/nonexistent/collection.json"}"#,
    )
    .unwrap();
    let output = bin()
        .args(["analyze", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("collection"));
}

#[test]
fn flags_override_config_file_values() {
    let config = temp_path("override.json");
    std::fs::write(
        &config,
        r#"{"probs": [0.5, 0.5], "motifs": ["(LL)"], "seed": 1}"#,
    )
    .unwrap();
    let out = temp_path("override_out.json");
    let status = bin()
        .args(["simulate", "--config", config.to_str().unwrap()])
        .args(["--probs", "0.3,0.7", "--n", "8", "--replicates", "4"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let value = read_json(&out);
    assert_eq!(value["config"]["probs"], serde_json::json!([0.3, 0.7]));
    assert_eq!(value["config"]["seed"], serde_json::json!(1));
}

#[test]
fn emitted_config_reruns_to_the_same_report() {
    let first_out = temp_path("roundtrip_a.json");
    let status = bin()
        .args([
            "analyze",
            "--probs",
            "0.15,0.35,0.35,0.15",
            "--motif",
            "((LELL)EEL)",
        ])
        .args(["--out", first_out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let first = read_json(&first_out);

    let mut echoed = first["config"].clone();
    echoed.as_object_mut().unwrap().remove("out");
    let config = temp_path("roundtrip_config.json");
    std::fs::write(&config, serde_json::to_string(&echoed).unwrap()).unwrap();

    let second_out = temp_path("roundtrip_b.json");
    let status = bin()
        .args(["analyze", "--config", config.to_str().unwrap()])
        .args(["--out", second_out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let second = read_json(&second_out);

    assert_eq!(first["report"], second["report"]);
    let mut second_config = second["config"].clone();
    second_config.as_object_mut().unwrap().remove("out");
    assert_eq!(echoed, second_config);
}

#[test]
fn stdout_is_used_when_no_out_is_given() {
    let output = bin()
        .args([
            "oracle", "--probs", "0.5,0.5", "--motif", "(LL)", "--n", "2",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["pmf"]["support"], serde_json::json!([1.0]));
    assert_eq!(value["pmf"]["probs"], serde_json::json!([1.0]));
}

#[test]
fn simulate_with_two_strings_forces_a_cherry() {
    let output = bin()
        .args(["simulate", "--probs", "0.5,0.5", "--motif", "(LL)"])
        .args([
            "--n",
            "2",
            "--replicates",
            "5",
            "--seed",
            "3",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    for line in stdout.lines().skip(3) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(
            fields[2], "1",
            "two distinct strings always form one cherry: {line}"
        );
    }
}

#[test]
fn poisson_mode_is_recorded_in_the_artifact() {
    let out = temp_path("poisson.json");
    let status = bin()
        .args(["simulate", "--probs", "0.5,0.5", "--motif", "(LL)"])
        .args(["--poisson", "7.5", "--replicates", "4", "--seed", "2"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let value = read_json(&out);
    assert_eq!(value["config"]["poisson"], serde_json::json!(7.5));
    assert_eq!(
        value["summary"]["population"],
        serde_json::json!({"poisson": 7.5})
    );
}

#[test]
fn conflicting_population_flags_exit_two() {
    let output = bin()
        .args(["simulate", "--probs", "0.5,0.5", "--motif", "(LL)"])
        .args(["--n", "4", "--poisson", "4.0", "--replicates", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("mutually exclusive"));
}

#[test]
fn motif_file_and_weights_flags_build_the_collection() {
    let motifs = temp_path("motifs.txt");
    std::fs::write(&motifs, "# binary three-leaf pair\n((LL)L)\n(L(LL))\n").unwrap();
    let out = temp_path("motif_file.json");
    let status = bin()
        .args(["analyze", "--probs", "0.5,0.5"])
        .args(["--motif-file", motifs.to_str().unwrap()])
        .args(["--weights", "1,-1"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let value = read_json(&out);
    assert_eq!(
        value["config"]["motifs"],
        serde_json::json!(["((LL)L)", "(L(LL))"])
    );
    assert_eq!(value["config"]["weights"], serde_json::json!([1.0, -1.0]));
    // Equal weights of opposite sign on isomorphic-depth motifs cancel in
    // the combo mean.
    let combo_mean = value["report"]["combo_mean_coeff"].as_f64().unwrap();
    assert!(combo_mean.abs() < 1e-15, "combo mean {combo_mean}");
}

#[test]
fn collection_file_supplies_weights() {
    let collection = temp_path("collection.json");
    std::fs::write(
        &collection,
        r#"[{"motif": "((LL)L)", "alpha": 2.0}, {"motif": "(L(LL))"}]"#,
    )
    .unwrap();
    let out = temp_path("collection_out.json");
    let status = bin()
        .args(["analyze", "--probs", "0.5,0.5"])
        .args(["--collection", collection.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let value = read_json(&out);
    assert_eq!(value["config"]["weights"], serde_json::json!([2.0, 1.0]));
}
