use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherebound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn eval_reproduces_values_at_minus_one() {
    for name in ["g1.json", "g2.json"] {
        let out = run(&["eval", &fixture(name), "-1"]);
        assert_eq!(out.status.code(), Some(0));
        let v = report(&out)["report"]["values"][0]["value"].as_f64().unwrap();
        assert!((v - 0.02).abs() <= 5e-3, "{name}: {v}");
    }
    let out = run(&["eval", &fixture("zero.json"), "0.3"]);
    assert_eq!(report(&out)["report"]["values"][0]["value"], 0.0);
}

#[test]
fn eval_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g1.csv").display().to_string();
    let out = run(&["eval", &fixture("g1.json"), "0", "--csv", &csv, "--samples", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 12);
    assert!(body.starts_with("t,value\n-1,"));
    let r = report(&out);
    assert_eq!(r["manifest"]["command"], "eval");
    assert_eq!(r["manifest"]["parameters"]["samples"], 11);
    assert_eq!(r["manifest"]["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.json", "{\"n\": 4,\n \"coeffs\": [1.0,, 2.0]}");
    let out = run(&["eval", &bad, "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn code_stats_for_the_24_cell() {
    let out = run(&["code-stats", "24cell", "--interval", "-1,-0.45", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["report"];
    assert_eq!(r["N"], 24);
    assert_eq!(r["interval_masses"][0]["mass"], 9.0);
    let dist: Vec<(String, String)> = r["distribution"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["t_exact"].as_str().unwrap().to_string(),
                e["mass_exact"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let expected = [("-1", "1"), ("-1/2", "8"), ("0", "6"), ("1/2", "8")];
    assert_eq!(
        dist,
        expected.map(|(a, b)| (a.to_string(), b.to_string())).to_vec()
    );
    // M_0 = N^2
    assert_eq!(r["moments"][0], 576.0);
}

#[test]
fn code_stats_for_the_simplex_and_bad_files() {
    let out = run(&["code-stats", "simplex4"]);
    let r = report(&out);
    let ips = r["report"]["inner_products"].as_array().unwrap();
    assert_eq!(ips.len(), 1);
    assert!((ips[0].as_f64().unwrap() + 0.25).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "code.json", r#"{"n": 2, "points": [[1, 0], [0, 2]]}"#);
    let out = run(&["code-stats", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('1'));
}

#[test]
fn verify_cert_outcomes() {
    let out = run(&["verify-cert", &fixture("g1_cert.json"), "--mode", "lipschitz-certified"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    let check = &r["report"]["checks"][0];
    assert_eq!(check["result"]["certified"], true);
    assert!(check["result"]["worst_violation"].as_f64().unwrap() <= 5e-3);

    let dir = tempfile::tempdir().unwrap();
    let bad_psd = write_temp(
        &dir,
        "h2.json",
        r#"{"n": 4, "d": 2, "F0": 0.0, "H": [[[1,0,0],[0,1,0],[0,0,1]], [[1,0],[0,1]], [[-1]]]}"#,
    );
    let out = run(&["verify-cert", &bad_psd]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    let failing: Vec<&Value> = r["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passes"] == false)
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["name"], "psd H2");
    assert!(failing[0]["result"]["witness"].is_array());

    let empty = write_temp(&dir, "empty.json", "{}");
    let out = run(&["verify-cert", &empty]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn bound_comparisons() {
    let out = run(&["bound", &fixture("g2_cert.json"), "--N", "24"]);
    let r = &report(&out)["report"];
    assert!((r["sdp_bound"].as_f64().unwrap() - 0.0188).abs() < 5e-5);
    assert!((r["lp_bound"].as_f64().unwrap() + 52.243).abs() < 1e-3);
    assert_eq!(r["stronger"], "sdp");

    let out = run(&["bound", &fixture("g1_cert.json"), "--N", "25"]);
    let r = &report(&out)["report"];
    assert!((r["sdp_bound"].as_f64().unwrap() - 0.0324).abs() < 5e-5);
    assert!(r["lp_bound"].is_null());
    assert!(r["lp_note"].as_str().unwrap().contains("negative"));

    let dir = tempfile::tempdir().unwrap();
    let cert = write_temp(&dir, "m.json", r#"{"g": {"n": 4, "coeffs": [1.0]}, "T": [-1, 0.5], "M": 24}"#);
    let out = run(&["bound", &cert, "--N", "24"]);
    assert_eq!(report(&out)["report"]["sdp_bound"], 0.0);
}

#[test]
fn kissing_check_exit_codes_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json").display().to_string();
    let b = dir.path().join("b.json").display().to_string();
    let args = |out: &str| {
        vec![
            "kissing-check".to_string(),
            fixture("g1_cert.json"),
            "--N".into(),
            "25".into(),
            "--starts".into(),
            "40".into(),
            "--seed".into(),
            "3".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    let run_owned = |v: Vec<String>| run(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(run_owned(args(&a)).status.code(), Some(4));
    run_owned(args(&b));
    let ra: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let rb: Value = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(ra["report"], rb["report"]);
    assert_eq!(ra["manifest"]["seed"], 3);
    assert_eq!(ra["report"]["verdict"], "CONTRADICTION");
    assert!((ra["report"]["upper_estimate"].as_f64().unwrap() - 0.0266).abs() < 1e-3);

    let out = run(&[
        "kissing-check",
        &fixture("g1_cert.json"),
        "--N",
        "24",
        "--starts",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["verdict"], "INCONCLUSIVE");
}

#[test]
fn kissing_check_refuses_without_sign_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cert = write_temp(&dir, "one.json", r#"{"g": {"n": 4, "coeffs": [1.0]}, "T": [-1, 0.5], "M": 22}"#);
    let out = run(&["kissing-check", &cert, "--starts", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("certified maximum"));
}
