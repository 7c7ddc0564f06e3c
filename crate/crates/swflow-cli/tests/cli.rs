use std::process::{Command, Output};

use serde_json::Value;
use swflow_cli::report::parse_csv;

fn swflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swflow")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn otsf_agrees_on_all_trials() {
    let out = swflow(&["otsf", "--seed", "1", "--trials", "10", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], 10);
    assert_eq!(v["summary"]["fail"], 0);
    assert!(v["summary"]["seconds"].is_null());
    assert_eq!(v["results"].as_array().unwrap().len(), 10);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = swflow(&["otsf", "--seed", "42", "--trials", "6", "--dim", "5"]);
    let b = swflow(&["otsf", "--seed", "42", "--trials", "6", "--dim", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let c = swflow(&["otsf", "--seed", "43", "--trials", "6", "--dim", "5"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn zero_trials_is_a_config_error() {
    let out = swflow(&["otsf", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_command_is_rejected() {
    assert_eq!(swflow(&["nosuch"]).status.code(), Some(2));
}

#[test]
fn swcheck_below_margin_fails() {
    let out = swflow(&["swcheck", "--cutoff", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["results"][0]["id"], "margin");
    assert_eq!(v["results"][0]["pass"], false);
    assert_eq!(v["summary"]["fail"], 1);
}

#[test]
fn wallcross_sf_matches_pairing() {
    let out = swflow(&["wallcross", "--flux", "-3..3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for r in v["results"].as_array().unwrap() {
        let d = r["values"]["flux"].as_i64().unwrap();
        for n in [2, 4, 8] {
            assert_eq!(r["values"][format!("sf_n{n}")].as_i64(), Some(-d));
        }
    }
}

#[test]
fn csv_counts_match_json() {
    let j = json(&swflow(&["wallcross", "--flux", "-2,0,5", "--seed", "3"]));
    let c = swflow(&["wallcross", "--flux", "-2,0,5", "--seed", "3", "--format", "csv"]);
    let recs = parse_csv(std::str::from_utf8(&c.stdout).unwrap()).unwrap();
    let pass = recs.iter().filter(|r| r.pass).count();
    assert_eq!(pass as u64, j["summary"]["pass"].as_u64().unwrap());
    assert_eq!((recs.len() - pass) as u64, j["summary"]["fail"].as_u64().unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("swflow-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# trial run\nseed = 5\ntrials = 3\ndim = 3\n").unwrap();
    let out_path = dir.join("report.json");
    let out = swflow(&[
        "otsf",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["trials"], 2);
    assert_eq!(v["config"]["dim"], 3);
    std::fs::write(&cfg, "trials = many\n").unwrap();
    assert_eq!(swflow(&["otsf", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn timing_fills_seconds() {
    let v = json(&swflow(&["wallcross", "--flux", "1", "--timing"]));
    assert!(v["summary"]["seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn torus_battery_passes() {
    let out = swflow(&["torus", "--seed", "7", "--cutoff", "2", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
