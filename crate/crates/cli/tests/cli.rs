use std::path::Path;
use std::process::{Command, Output};

fn eqdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqdist"))
        .args(args)
        .env_remove("EQDIST_THREADS")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(eqdist(&["expsum", "--range", "p<=10"]).status.code(), Some(1));
    assert_eq!(eqdist(&["expsum", "--lemma", "nope"]).status.code(), Some(1));
    assert_eq!(eqdist(&["gaps", "--n", "0"]).status.code(), Some(1));
    assert_eq!(eqdist(&["limit", "--t-max", "6", "--cap", "4"]).status.code(), Some(1));
    assert_eq!(eqdist(&["rate", "--n-list", "100"]).status.code(), Some(1));
    assert_eq!(eqdist(&["limit", "--mode", "horocycle"]).status.code(), Some(1));
    assert_eq!(eqdist(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(eqdist(&[]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    let out = eqdist(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("expsum"));
    let out = eqdist(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn gaps_writes_grid_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let out = eqdist(&["gaps", "--n", "1000000", "--t-max", "6", "--t-step", "0.05", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = read(&csv);
    assert!(text.starts_with(&format!("# eqdist {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# config: {\"n\":1000000,\"t_max\":6.0,\"t_step\":0.05}"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 121);
    assert_eq!(rows[0], "0,0,0");
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("g.json"))).unwrap();
    assert_eq!(summary["zero_gaps"], 999);
}

#[test]
fn single_point_has_one_gap() {
    let out = eqdist(&["gaps", "--n", "1", "--t-max", "2", "--t-step", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&stdout), vec!["0,0,0", "1,0,0", "2,1,1"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("\"gaps\": 1"));
}

#[test]
fn explicit_bound_sweep_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("l3.csv");
    let out = eqdist(&["expsum", "--lemma", "l3", "--range", "q<=5000", "--samples", "50", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_rows(&read(&csv)).len(), 250_000);
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("l3.json"))).unwrap();
    assert_eq!(summary["violations"], 0);
    assert!(summary["max_ratio"].as_f64().unwrap() <= 1.0);
}

#[test]
fn violated_bound_exits_two() {
    let out = eqdist(&["expsum", "--lemma", "weil", "--range", "p<=100", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound violated"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 50, "t_max": 1.0, "t_step": 0.5, "threads": 2}"#).unwrap();
    let out = eqdist(&["gaps", "--config", cfg.to_str().unwrap(), "--n", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("# config: {\"n\":60,\"t_max\":1.0,\"t_step\":0.5}"));
    assert_eq!(data_rows(&stdout).len(), 3);

    std::fs::write(&cfg, r#"{"n": 50, "bogus": 1}"#).unwrap();
    assert_eq!(eqdist(&["gaps", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn thread_environment_variable() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_eqdist"))
            .args(["gaps", "--n", "10000", "--threads", "3"])
            .env("EQDIST_THREADS", env)
            .output()
            .unwrap()
    };
    let a = run("1");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(run("4").stdout, a.stdout);
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}

#[test]
fn rate_reports_positive_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let out = eqdist(&[
        "rate", "--n-list", "1000,10000,100000,1000000", "--samples", "200000", "--seed", "1", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(&dir.path().join("r.json"))).unwrap();
    assert!(summary["rate_fit"]["exponent"].as_f64().unwrap() > 0.0);
    assert_eq!(data_rows(&read(&csv)).len(), 4);
}

#[test]
fn horocycle_mode_warns_when_undersampled() {
    let out = eqdist(&["limit", "--mode", "horocycle", "--y", "0.0001", "--steps", "4000", "--t-max", "1", "--t-step", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(data_rows(&stdout).len(), 3);
}
