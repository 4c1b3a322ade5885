use std::fs;
use std::path::Path;
use std::process::Command;

use nstar::cli::run;

const BIN: &str = env!("CARGO_BIN_EXE_nstar");

fn nstar(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn half<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--p", "0.5", "--q", "0.5", "--r", "0.5", "--N", "4"];
    v.extend_from_slice(extra);
    v
}

#[test]
fn params_prints_derived_values() {
    let mut args = vec!["params"];
    args.extend(half(&[]));
    let out = nstar(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("alpha1 = 0.5\n"));
    assert!(text.contains("beta = 3.5\n"));
    assert!(text.contains("gamma_in = 9\n"));
    assert!(text.contains("gamma_out = 4.6"));
    assert!(text.contains("open_cube = true"));
}

#[test]
fn params_warns_on_boundary() {
    let out = nstar(&["params", "--p", "1", "--q", "0.5", "--r", "0.5"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("theorem hypothesis violated (p=1)"), "{err}");
}

#[test]
fn invalid_input_exits_with_usage_code() {
    let out = nstar(&[
        "params", "--p", "0.5", "--q", "0.5", "--r", "0.5", "--N", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(nstar(&["params", "--p", "0.5"]).status.code(), Some(1));
    assert_eq!(nstar(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(["nstar", "--help"]), 0);
}

#[test]
fn theory_rejects_open_cube_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = nstar(&[
        "theory", "--p", "1", "--q", "0.5", "--r", "0.5", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("hypothesis"));
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn simulate_writes_snapshots_and_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let mut args = vec!["simulate"];
    args.extend(half(&[
        "--steps",
        "2000",
        "--replicas",
        "2",
        "--snapshots",
        "0,1000",
        "--out",
        out_dir,
    ]));
    assert_eq!(run(std::iter::once("nstar").chain(args.iter().copied())), 0);
    for name in [
        "snapshot_r0_n0.csv",
        "snapshot_r1_n0.csv",
        "snapshot_r0_n1000.csv",
        "snapshot_r1_n1000.csv",
        "ensemble_n0.csv",
        "ensemble_n1000.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let initial = read(dir.path(), "snapshot_r0_n0.csv");
    assert!(initial.starts_with("# format_version=1\n"));
    assert!(initial.contains("replica,seed,n,V_n\n"));
    assert!(initial.contains("\nd,w1,w2,count\n1,0,1,3\n3,1,0,1\n"));
    assert!(initial.contains("\nd1,d2,count\n0,1,3\n3,0,1\n"));
    assert!(!dir.path().join("snapshot_r0_n2000.csv").exists());
}

#[test]
fn simulate_json_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let mut args = vec!["nstar", "simulate"];
    args.extend(half(&[
        "--steps", "500", "--format", "json", "--out", out_dir,
    ]));
    assert_eq!(run(args), 0);
    let v: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "snapshot_r0_n500.json")).unwrap();
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["config"]["params"]["N"], 4);
    assert_eq!(v["config"]["n_steps"], 500);
    assert_eq!(v["n"], 500);
    let counted: u64 = v["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["count"].as_u64().unwrap())
        .sum();
    assert_eq!(counted, v["V_n"].as_u64().unwrap());
    let config: nstar::cli::RunConfig = serde_json::from_value(v["config"].clone()).unwrap();
    assert_eq!(config.schedule(), vec![500]);
}

#[test]
fn schedule_beyond_steps_is_rejected() {
    let mut args = vec!["nstar", "simulate"];
    args.extend(half(&["--steps", "10", "--snapshots", "20"]));
    assert_eq!(run(args), 1);
    let mut args = vec!["nstar", "simulate"];
    args.extend(half(&["--steps", "10", "--replicas", "0"]));
    assert_eq!(run(args), 1);
}

#[test]
fn theory_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let mut args = vec!["nstar", "theory"];
    args.extend(half(&[
        "--caps-d",
        "30",
        "--caps-w1",
        "5",
        "--caps-w2",
        "10",
        "--out",
        out_dir,
    ]));
    assert_eq!(run(args), 0);
    let x3 = read(dir.path(), "x3.csv");
    assert!(x3.contains("d,w1,w2,value\n"));
    assert!(x3.contains("\n3,1,0,0.1\n"));
    let x2 = read(dir.path(), "x2.csv");
    assert!(x2.contains("\n1,0,0.1\n"));
    let y = read(dir.path(), "y.csv");
    assert!(y.contains("\n3,0,0.1\n"));
    let constants = read(dir.path(), "constants.csv");
    assert!(constants.contains("gamma_in,,9"));
    assert!(constants.lines().filter(|l| l.starts_with("C,")).count() == 6);
}

#[test]
fn verify_reports_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let mut args = vec!["verify"];
    args.extend(half(&[
        "--steps", "20000", "--trials", "20000", "--format", "json", "--out", out_dir,
    ]));
    let out = nstar(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS kernel_marginals_n0"), "{text}");
    assert!(text.contains("PASS mc_total_variation"), "{text}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(report["format_version"], 1);
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 2 }));

    // an impossible tolerance must fail with the verification exit code
    let mut args = vec!["verify"];
    args.extend(half(&[
        "--steps", "2000", "--trials", "1000", "--tol-tv", "0", "--out", out_dir,
    ]));
    assert_eq!(nstar(&args).status.code(), Some(2));
}
