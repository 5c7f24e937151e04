mod common;

use std::process::Command;

fn gftpl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gftpl"))
}

#[test]
fn run_plot_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::example("vcg_minimal.toml");
    let status = gftpl()
        .args([
            "run",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--seeds",
            "4,5",
            "--jobs",
            "2",
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(
        dir.path().join("trace_T10_seed4.csv").exists()
            && dir.path().join("trace_T10_seed5.csv").exists()
    );
    assert!(!dir.path().join("trace_T10_seed1.csv").exists());
    let svg = dir.path().join("curve.svg");
    let pattern = format!("{}/trace_*.csv", dir.path().display());
    let out = gftpl()
        .args(["plot", &pattern, "--out", svg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success() && svg.exists());
    let out = gftpl()
        .args(["verify", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("implementability: PASS") && !text.contains("FAIL"),
        "{text}"
    );
}

#[test]
fn config_errors_exit_with_the_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        common::example_text("vcg_minimal.toml").replace("m = 3", "m = -3"),
    )
    .unwrap();
    let out = gftpl()
        .args([
            "run",
            path.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("environment.m"));
    let out = gftpl()
        .args([
            "run",
            common::example("vcg_minimal.toml").to_str().unwrap(),
            "--seeds",
            "1,1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeds[1]"));
}

#[test]
fn plot_without_traces_fails() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = format!("{}/none_*.csv", dir.path().display());
    let out = gftpl()
        .args([
            "plot",
            &pattern,
            "--out",
            dir.path().join("x.svg").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
