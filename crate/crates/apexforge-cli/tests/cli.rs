//! End-to-end tests of the command-line surface: exit codes, output formats,
//! byte-level determinism, and tamper detection.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_apexforge"))
}

fn write_k2_pattern(dir: &Path) -> PathBuf {
    let path = dir.join("k2.pat");
    std::fs::write(&path, "2 2\n1\n2\n").unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn params_turan_reference_values() {
    let out = bin()
        .args([
            "params", "turan", "--d", "2", "--parts", "2", "--edges", "1;2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["t"], 4);
    assert_eq!(v["r"], 9);
    assert_eq!(v["l"], 12);
    assert_eq!(v["n_proj"], 15);
    assert_eq!(v["degrees"], serde_json::json!([2, 3, 4, 12]));
    assert_eq!(v["preconditions"]["all_ok"], true);
}

#[test]
fn params_zarankiewicz_reference_values() {
    let out = bin()
        .args(["params", "zarankiewicz", "--S", "4", "--m", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["r"], 2);
    assert_eq!(v["t"], 2);
    assert_eq!(v["bracket_ok"], true);
}

#[test]
fn params_missing_edges_exits_2() {
    let out = bin()
        .args(["params", "turan", "--parts", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_is_deterministic_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let pat = write_k2_pattern(dir.path());
    let common = [
        "construct",
        "turan",
        "--p",
        "11",
        "--N",
        "4",
        "--r",
        "1",
        "--t",
        "1",
        "--degrees",
        "2",
        "--seed",
        "0",
    ];
    for stem in ["a", "b"] {
        let out = bin()
            .args(common)
            .args(["--pattern-file", pat.to_str().unwrap()])
            .args(["--out", dir.path().to_str().unwrap(), "--stem", stem])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let cert_a = std::fs::read(dir.path().join("a.json")).unwrap();
    let mut cert_b = std::fs::read(dir.path().join("b.json")).unwrap();
    // The stem appears in the edges_file field; normalize before comparing.
    let cert_b_str = String::from_utf8(cert_b.clone())
        .unwrap()
        .replace("b.edges", "a.edges");
    cert_b = cert_b_str.into_bytes();
    assert_eq!(
        cert_a, cert_b,
        "identical config must produce identical certificates"
    );
    let edges_a = std::fs::read(dir.path().join("a.edges")).unwrap();
    let edges_b = std::fs::read(dir.path().join("b.edges")).unwrap();
    assert_eq!(edges_a, edges_b);

    // Fresh certificate verifies.
    let verify = bin()
        .arg("verify")
        .arg(dir.path().join("a.json"))
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(0));

    // Deleting an edge from the edge file must be detected.
    let text = String::from_utf8(edges_a.clone()).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(dir.path().join("a.edges"), lines.join("\n")).unwrap();
    let verify = bin()
        .arg("verify")
        .arg(dir.path().join("a.json"))
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(1));
    std::fs::write(dir.path().join("a.edges"), &edges_a).unwrap();

    // Lowering realized_k by hand must be detected.
    let cert_text = String::from_utf8(cert_a.clone()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&cert_text).unwrap();
    let k = v["verification"]["realized_k"].as_u64().unwrap();
    let tampered = cert_text.replacen(
        &format!("\"realized_k\": {k}"),
        &format!("\"realized_k\": {}", k - 1),
        1,
    );
    assert_ne!(tampered, cert_text);
    std::fs::write(dir.path().join("a.json"), tampered).unwrap();
    let verify = bin()
        .arg("verify")
        .arg(dir.path().join("a.json"))
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(1));

    // Malformed certificate: exit 2.
    std::fs::write(dir.path().join("a.json"), b"{ not json").unwrap();
    let verify = bin()
        .arg("verify")
        .arg(dir.path().join("a.json"))
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(2));
}

#[test]
fn construct_budget_zero_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let pat = write_k2_pattern(dir.path());
    let out = bin()
        .args([
            "construct",
            "turan",
            "--p",
            "11",
            "--N",
            "4",
            "--r",
            "1",
            "--t",
            "1",
            "--degrees",
            "2",
            "--seed",
            "0",
            "--attempts",
            "0",
        ])
        .args(["--pattern-file", pat.to_str().unwrap()])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn census_single_prime_has_no_slope() {
    let dir = tempfile::tempdir().unwrap();
    let pat = write_k2_pattern(dir.path());
    let out = bin()
        .args([
            "census",
            "--primes",
            "11",
            "--N",
            "4",
            "--r",
            "1",
            "--t",
            "1",
            "--degrees",
            "2",
            "--seed",
            "0",
        ])
        .args(["--pattern-file", pat.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(
        lines[1].ends_with(','),
        "no fitted slope on a single-prime sweep"
    );
}

#[test]
fn threads_flag_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let pat = write_k2_pattern(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let out = bin()
            .args([
                "construct",
                "turan",
                "--p",
                "7",
                "--N",
                "4",
                "--r",
                "1",
                "--t",
                "1",
                "--degrees",
                "2",
                "--seed",
                "3",
                "--threads",
                threads,
            ])
            .args(["--pattern-file", pat.to_str().unwrap()])
            .args([
                "--out",
                dir.path().to_str().unwrap(),
                "--stem",
                &format!("t{threads}"),
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(dir.path().join(format!("t{threads}.edges"))).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn selftest_fault_hook_flips_exit_code() {
    let out = bin().arg("selftest").output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = bin()
        .arg("selftest")
        .env("APEXFORGE_SELFTEST_FAULT", "regseq")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
