//! Command-line behavior: golden outputs, exit codes, configuration and
//! determinism.
//!
//! Set MIRRORLAB_UPDATE_GOLDEN=1 to rewrite the files in tests/golden.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mirrorlab"));
    c.env_remove("MIRRORLAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

fn check_golden(name: &str, args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let path = golden_path(name);
    if std::env::var_os("MIRRORLAB_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(out.stdout == want, "{args:?} differs from {}", path.display());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn golden_tiling_svg() {
    let svg = check_golden("trop_window1.svg", &["trop", "--window=-1,-1,1,1", "--format", "svg"]);
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn golden_facet_csv() {
    let csv = check_golden("trop_facets_r1.csv", &["trop", "--format", "csv"]);
    // The centre tile and its six neighbours.
    assert_eq!(csv.lines().count(), 1 + 7);
    assert!(csv.lines().skip(1).any(|l| l == "0,0,0,0,1,0"));
}

#[test]
fn golden_sphere_count_csv() {
    let csv = check_golden("sphere_c.csv", &["sphere-c", "--format", "csv"]);
    assert_eq!(csv.lines().nth(1), Some("0,1"));
}

#[test]
fn golden_differential_csv() {
    let csv = check_golden("differential_cutoff4.csv", &["differential", "--cutoff", "4", "--format", "csv"]);
    assert!(csv.lines().any(|l| l == "0,0,0,0,2,6"));
}

#[test]
fn golden_disc_series_json() {
    let json = check_golden("disc_series_cutoff4.json", &["disc-series", "--cutoff", "4"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["result"]["agree"], true);
}

#[test]
fn golden_monodromy_json() {
    let json = check_golden("monodromy_3.json", &["monodromy", "--samples", "3"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["status"], "pass");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sphere-c"]).status.code(), Some(0));
    assert_eq!(run(&["metric-check", "--c-base", "2^-300", "--samples", "50"]).status.code(), Some(1));
    assert_eq!(run(&["metric-check", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["leibniz", "--cutoff", "3"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["functor", "--format", "svg"]).status.code(), Some(64));
    assert_eq!(run(&["functor", "--i", "2", "--j", "1"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
}

#[test]
fn config_file_and_seed_override() {
    let dir = std::env::temp_dir().join(format!("mirrorlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    let mut f = std::fs::File::create(&cfg).unwrap();
    writeln!(f, "# monodromy settings\nsamples = 2\nseed = 5").unwrap();
    drop(f);
    let cfg_s = cfg.to_str().unwrap();

    let out = run(&["--config", cfg_s, "monodromy"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["samples"], "2");
    assert_eq!(v["config"]["seed"], "5");

    let out = bin().args(["--config", cfg_s, "monodromy"]).env("MIRRORLAB_SEED", "9").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], "9");

    let out = bin().args(["--config", cfg_s, "monodromy", "--seed", "11"]).env("MIRRORLAB_SEED", "9").output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], "11");

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg_s, "monodromy"]).status.code(), Some(64));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("mirrorlab-out-{}.csv", std::process::id()));
    let out = run(&["sphere-c", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&["sphere-c", "--format", "csv"]).stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn metric_report_is_byte_identical_across_threads() {
    let args = ["metric-check", "--samples", "40"];
    let a = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("RAYON_NUM_THREADS", "4").output().unwrap();
    let c = bin().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}
