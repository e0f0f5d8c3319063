use std::path::Path;
use std::process::{Command, Output};

fn config(dir: &Path, task: &str, a: f64, n: usize, extra: &str) -> std::path::PathBuf {
    let text = format!(
        "task = \"{task}\"\n[schedule]\na = {a:?}\nb = 1.1\nc = 2.6\nalpha = 0.15\n[grid]\nn = {n}\n[profile]\nkind = \"constant\"\nvalue = 1.0\n[output]\ndir = \"{}\"\n{extra}",
        dir.join("out").display()
    );
    let path = dir.join(format!("{task}.toml"));
    std::fs::write(&path, text).unwrap();
    path
}

fn ci_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ci-lab")).args(args).env("CI_LAB_THREADS", "1").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn schedule_report_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "schedule_report", 2.0, 32, "");
    let o = ci_lab(&["schedule_report", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("warn ") && stdout.contains("summary:"));
    assert!(dir.path().join("out/summary.toml").exists());
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = config(dir.path(), "schedule_report", 2.0, 66, "");
    let o = ci_lab(&["schedule_report", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.n"));

    let desk = config(dir.path(), "init", 2.0, 32, "");
    let o = ci_lab(&["schedule_report", "--config", desk.to_str().unwrap(), "--strict"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));

    let o = ci_lab(&["schedule_report", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_ci-lab"))
        .args(["schedule_report", "--config", desk.to_str().unwrap()])
        .env("CI_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn failed_strict_estimate_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let init = config(dir.path(), "init", 2.0, 32, "");
    assert_eq!(code(&ci_lab(&["init", "--config", init.to_str().unwrap()])), 0);
    let stress = dir.path().join("out/q0_stress_t0.0000.cins");
    assert!(stress.exists());
    // A huge base passes every strict schedule check but shrinks the stress bound far below the stored stress.
    let extra = format!("[diagnose]\nsnapshots = [\"{}\"]\n", stress.display());
    let diag = config(dir.path(), "diagnose", 1e6, 32, &extra);
    let o = ci_lab(&["diagnose", "--config", diag.to_str().unwrap(), "--strict"]);
    assert_eq!(code(&o), 1, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
