use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BASE: &str = r#"
[model]
kind = "muskat_capillary"

[physical]
mu_minus = 1.0
mu_plus = 1.0
rho_minus = 2.0
rho_plus = 1.0
gamma_f = 1.0
gamma_h = 1.0
gravity = 1.0

[means]
f = 1.0
g = 1.5

[initial.f]
kind = "single_mode"
amplitude = 0.01
k = 1

[initial.g]
kind = "random_decay"
seed = 3
exponent = 2.0
amplitude = 0.002

[check]
require = ["wiener_decay"]
"#;

const STEPPER: &str = r#"
[stepper]
dt = 1e-4
bandwidth = 8
t_end = 0.01
sample_every = 5
"#;

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn thinfilm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinfilm"))
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

#[test]
fn check_writes_report_and_succeeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", BASE);
    let out = thinfilm(dir.path(), &["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.toml")).unwrap();
    let doc: toml::Table = report.parse().unwrap();
    assert_eq!(doc["schema_version"].as_integer(), Some(1));
    assert_eq!(doc["command"].as_str(), Some("check"));
    assert_eq!(doc["passed"].as_bool(), Some(true));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let body = BASE.replace("[means]", "[means]\nh = 2.0");
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = thinfilm(dir.path(), &["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_file_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = thinfilm(dir.path(), &["check", "--config", "/nonexistent/x.toml"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn failed_gate_blocks_run_unless_forced() {
    let dir = TempDir::new().unwrap();
    let body = format!("{}{}", BASE.replace("g = 1.5", "g = 0.5"), STEPPER);
    let cfg = write_config(dir.path(), "c.toml", &body);
    let path = cfg.to_str().unwrap();
    assert_eq!(code(&thinfilm(dir.path(), &["check", "--config", path])), 1);
    assert_eq!(code(&thinfilm(dir.path(), &["run", "--config", path])), 1);
    assert!(!dir.path().join("out/series.csv").exists());
    assert!(dir.path().join("out/report.toml").exists());
    let forced = thinfilm(dir.path(), &["run", "--config", path, "--force"]);
    assert!(dir.path().join("out/series.csv").exists());
    let report = fs::read_to_string(dir.path().join("out/report.toml")).unwrap();
    assert!(report.contains("forced = true"));
    assert!(matches!(code(&forced), 0 | 1));
}

#[test]
fn explicit_blow_up_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        "{}{}",
        BASE,
        r#"
[stepper]
dt = 0.1
scheme = "rk4_explicit"
bandwidth = 32
t_end = 100.0
"#
    );
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = thinfilm(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_is_bit_reproducible_and_emits_plot_script() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &format!("{BASE}{STEPPER}"));
    let path = cfg.to_str().unwrap();
    let csv = dir.path().join("out/series.csv");
    let first = thinfilm(dir.path(), &["run", "--config", path, "--emit-plot-script"]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let a = fs::read(&csv).unwrap();
    assert!(dir.path().join("out/plot_series.py").exists());
    thinfilm(dir.path(), &["run", "--config", path]);
    assert_eq!(a, fs::read(&csv).unwrap());
    let reseeded = thinfilm(dir.path(), &["--seed", "99", "run", "--config", path]);
    assert_eq!(code(&reseeded), 0);
    assert_ne!(a, fs::read(&csv).unwrap());
}

#[test]
fn sweep_rows_follow_the_grid() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        "{BASE}\n[sweep]\naxis = [{{ key = \"means.g\", values = [0.5, 1.0, 1.5] }}, {{ key = \"physical.rho_minus\", values = [2.0, 3.0] }}]\n"
    );
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = thinfilm(dir.path(), &["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("means.g,physical.rho_minus"));
    let coords: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(coords[0], (0.5, 2.0));
    assert_eq!(coords[1], (0.5, 3.0));
    assert_eq!(coords[5], (1.5, 3.0));
}

#[test]
fn empty_sweep_axis_is_rejected() {
    let dir = TempDir::new().unwrap();
    let body = format!("{BASE}\n[sweep]\naxis = [{{ key = \"means.g\", values = [] }}]\n");
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = thinfilm(dir.path(), &["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn convergence_reports_orders() {
    let dir = TempDir::new().unwrap();
    let body = format!("{BASE}{STEPPER}\n[convergence]\nlevels = 3\n");
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = thinfilm(dir.path(), &["convergence", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn verify_passes() {
    let dir = TempDir::new().unwrap();
    let out = thinfilm(dir.path(), &["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("out/verify.toml").exists());
}
