//! Exit-code and error-surface contract of the `mixcert` binary.

use std::process::{Command, Output};

fn mixcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixcert"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const VALID: &str = r#"
[scenario]
name = "tiny"
kind = "regular"

[group]
kind = "lattice"
dim = 1

[space]
radius = 14.0
multiplier = "position"

[net]
strategy = "ray"
step = [2]
count = 6

[probes]
kind = "ball_deltas"
radius = 2
"#;

#[test]
fn certify_missing_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mixcert(&[
        "certify",
        "--config",
        "/nonexistent/nowhere.toml",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn certify_unknown_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &VALID.replace("[probes]", "mystery = 1\n[probes]"));
    let out = mixcert(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed config"));
}

#[test]
fn certify_bad_block_value_names_the_block() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &VALID.replace("\"ray\"", "\"spiral\""));
    let out = mixcert(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[net]"));
}

#[test]
fn certify_valid_config_exits_0_and_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), VALID);
    let out_dir = tmp.path().join("out");
    let out = mixcert(&[
        "certify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.txt", "spectrum.csv", "dj_residuals.csv", "decay.csv"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("overall: mixing-along-net"));
    // float cells use the full 17-significant-digit exponent form
    let spectrum = std::fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("index,eigenvalue\n"));
    assert!(spectrum.contains("1.0000000000000000e0"));
}

#[test]
fn identities_bad_max_dim_exits_2() {
    let out = mixcert(&["identities", "--seed", "7", "--max-dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identities_pass_exits_0_with_summary() {
    let out = mixcert(&["identities", "--seed", "5", "--max-dim", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("summary:"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn axioms_clean_group_exits_0() {
    let out = mixcert(&["axioms", "--group", "f2", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all axioms hold"));
    assert!(stdout.contains("|B_2| = 17"));
}

#[test]
fn axioms_flat_adapter_rejected_with_witness_exits_1() {
    let out = mixcert(&["axioms", "--group", "z2-flat", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("(L4)"));
    assert!(stdout.contains("witness"));
}

#[test]
fn axioms_squared_metric_rejected_for_subadditivity() {
    let out = mixcert(&["axioms", "--group", "r2-squared", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(L3)"));
}

#[test]
fn axioms_unknown_group_exits_2() {
    let out = mixcert(&["axioms", "--group", "q8", "--samples", "10", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(2));
}
