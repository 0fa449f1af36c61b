use std::path::{Path, PathBuf};
use std::process::Command;

use kds_scatter::config::Config;
use kds_scatter::scenario::{run_scenario, Command as Scenario};

const SMALL: &str = "[physics]\nspin = 0.1\n[grid]\nn_x = 801\nx_max = 40.0\nn_theta = 12\nq_max = 3\n[run]\nevolve_time = 4.0\n";

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("kds-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn kds(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kds")).args(args).current_dir(dir).output().unwrap()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn evolve_reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = scratch_dir("evolve");
    std::fs::write(dir.join("small.toml"), SMALL).unwrap();
    let a = kds(&["evolve", "--config", "small.toml", "--out", "a", "--threads", "1"], &dir);
    let b = kds(&["evolve", "--config", "small.toml", "--out", "b", "--threads", "3"], &dir);
    let c = kds(&["evolve", "--config", "small.toml", "--out", "c"], &dir);
    for o in [&a, &b, &c] {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ra = read_all(&dir.join("a"));
    assert_eq!(ra.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(), ["evolve.csv", "summary.json"]);
    assert_eq!(ra, read_all(&dir.join("b")));
    assert_eq!(ra, read_all(&dir.join("c")));
}

#[test]
fn summary_embeds_resolved_config_and_version() {
    let dir = scratch_dir("summary");
    std::fs::write(dir.join("small.toml"), SMALL).unwrap();
    let o = kds(&["spectrum", "--config", "small.toml", "--out", "s", "--seed", "17"], &dir);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("s/summary.json")).unwrap()).unwrap();
    assert_eq!(v["tool"], "kds");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["config"]["run"]["seed"], 17);
    assert_eq!(v["config"]["grid"]["x_max"], 40.0);
    assert!(v["config"]["scattering"]["t_max"].as_f64().unwrap() > 0.0);
    let cfg: Config = serde_json::from_value(v["config"].clone()).unwrap();
    assert_eq!(cfg.physics.spin, 0.1);
}

#[test]
fn missing_horizon_gap_exits_nonzero() {
    let dir = scratch_dir("nogap");
    std::fs::write(dir.join("bad.toml"), "[physics]\nlambda = 0.2\nspin = 0.0\n").unwrap();
    let o = kds(&["background", "--config", "bad.toml", "--out", "o"], &dir);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("background"));
    assert!(!dir.join("o/summary.json").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = scratch_dir("badkey");
    std::fs::write(dir.join("bad.toml"), "[grid]\nnx = 100\n").unwrap();
    let o = kds(&["spectrum", "--config", "bad.toml"], &dir);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn background_scenario_is_deterministic_and_passes() {
    let cfg = Config::default();
    let a = run_scenario(Scenario::Background, &cfg).unwrap();
    let b = run_scenario(Scenario::Background, &cfg).unwrap();
    assert!(a.passed());
    assert_eq!(a.summary_json(), b.summary_json());
    assert_eq!(a.tables, b.tables);
    assert!(a.tables["chart.csv"].starts_with("x,r,delta_r"));
}

#[test]
fn short_chart_fails_the_kappa_fit_check() {
    let a = run_scenario(Scenario::Background, &Config::from_toml_str(SMALL).unwrap()).unwrap();
    assert!(!a.passed());
}

#[test]
fn command_names_round_trip() {
    for c in Scenario::ALL {
        assert_eq!(c.name().parse::<Scenario>().unwrap(), c);
    }
    assert!("plot".parse::<Scenario>().is_err());
}
