use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
[model]
tag = "hall25d"

[grid]
dim = 2
n = 16

[physics]
nu = 0.1
eta = 0.1
hall = 1.0

[stepper]
dt = 0.01
t_end = 0.05
diag_interval = 0.01

[scenario]
name = "random_divfree"
seed = 3
"#;

fn hallmhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallmhd"))
        .args(args)
        .env("HALLMHD_THREADS", "1")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "  \n");
    for cmd in ["run", "constants", "resume"] {
        let out = hallmhd(&[cmd, &cfg]);
        assert_eq!(out.status.code(), Some(2), "{cmd}: {}", text(&out.stderr));
        assert!(text(&out.stderr).contains("empty"));
    }
}

#[test]
fn missing_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("n = 16\n", ""));
    let out = hallmhd(&["constants", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("`n`"), "{}", text(&out.stderr));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(hallmhd(&["verify", "A99"]).status.code(), Some(2));
    assert_eq!(hallmhd(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = hallmhd(&["run", &cfg, "--set", "nosuchsection"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_single_criterion() {
    let out = hallmhd(&["verify", "A8"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.starts_with("A8 PASS"), "{stdout}");
}

#[test]
fn run_writes_outputs_and_applies_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_dir = dir.path().join("out");
    let out = hallmhd(&[
        "run",
        &cfg,
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--t-end",
        "0.03",
        "--set",
        "output.csv=\"series.csv\"",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.contains("records = 4"), "{stdout}");
    let csv = fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let summary = fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains("t_end = 0.03"));
}

#[test]
fn resume_appends_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{CONFIG}\n[checkpoint]\npath = \"run.ckpt\"\n"),
    );
    let out_dir = dir.path().display().to_string();
    let first = hallmhd(&["run", &cfg, "--out-dir", &out_dir, "--t-end", "0.02"]);
    assert_eq!(first.status.code(), Some(0), "{}", text(&first.stderr));
    let second = hallmhd(&["resume", &cfg, "--out-dir", &out_dir]);
    assert_eq!(second.status.code(), Some(0), "{}", text(&second.stderr));
    let csv = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    // header, records at 0, 0.01, 0.02, then 0.03, 0.04, 0.05
    assert_eq!(csv.lines().count(), 7);
    assert!(text(&second.stdout).contains("resumed = true"));
}

#[test]
fn blow_up_exits_with_failure_record() {
    let dir = tempfile::tempdir().unwrap();
    let text_cfg = CONFIG
        .replace("nu = 0.1", "nu = 0.0")
        .replace("eta = 0.1", "eta = 0.0")
        .replace("dt = 0.01", "dt = 1.0")
        .replace("t_end = 0.05", "t_end = 20.0")
        .replace("diag_interval = 0.01", "diag_interval = 1.0")
        .replace("seed = 3", "seed = 3\namplitude = 1000.0");
    let cfg = write_config(dir.path(), &text_cfg);
    let out = hallmhd(&["run", &cfg, "--out-dir", &dir.path().display().to_string()]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
    let stderr = text(&out.stderr);
    let line = stderr
        .lines()
        .find_map(|l| l.strip_prefix("failure record: "))
        .expect("failure record path printed");
    assert!(Path::new(line).exists());
}

#[test]
fn constants_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = hallmhd(&["constants", &cfg, "--hall", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    for key in ["model = hall25d", "c0.value = ", "hmhd.predicate = "] {
        assert!(stdout.contains(key), "missing {key:?}");
    }
}
