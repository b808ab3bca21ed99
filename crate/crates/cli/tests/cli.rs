//! CLI behavior: exit codes, error records, output contracts.

use std::path::Path;
use std::process::Command;

fn translab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_translab"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_errors_exit_nonzero_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, "dimension = 4\n[interface]\nfamily = \"flat\"\n");
    let out = translab()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("\"error\""), "no error record: {stderr}");
    assert!(stderr.contains("dimension"), "bound not named: {stderr}");
    // nothing was computed or written
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn declared_command_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(&cfg, "command = \"solve\"\n[interface]\nfamily = \"flat\"\n");
    let out = translab()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_interface_family_is_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(&cfg, "[interface]\nfamily = \"moebius\"\n");
    let out = translab()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("family"));
}

#[test]
fn sweep_row_count_matches_sweep_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        r#"
dimension = 2
[interface]
family = "sinusoid"
params = [0.0, 0.0]
[quadrature]
surface_order = 8
poisson_order = 32
[stability]
sweep = [0.2, 0.1, 0.05, 0.025]
grid = 64
"#,
    );
    let out = translab()
        .args(["stability-sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("stability_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5, "header plus one row per sweep value");
    assert_eq!(
        lines[0],
        "theta,delta,eps,gamma,flatness,horizontality,gap,eta,barrier_low,barrier_high"
    );
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"stability_experiment\""));
}

#[test]
fn verify_smoke_passes_on_flat_interface() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        r#"
dimension = 2
[interface]
family = "flat"
[quadrature]
surface_order = 16
poisson_order = 64
[verify]
eps = 0.1
h = 0.01
points = 40
"#,
    );
    let out = translab()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.lines().count() > 4);
    assert!(!csv.contains(",false"), "a check failed:\n{csv}");
}

#[test]
fn flat_profile_rows_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(
        &cfg,
        r#"
dimension = 2
[interface]
family = "flat"
[quadrature]
surface_order = 8
poisson_order = 32
[flat]
c0 = 1.0
a = 0.0
r = 1.0
lines = [0.0, 0.25, -0.4]
samples_per_line = 17
"#,
    );
    let out = translab()
        .args(["flat", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("flat_profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 17);
}
