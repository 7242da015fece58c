use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_czeros");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CZEROS_WORKERS").output().expect("spawn czeros")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("single JSON object")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["kl", "--ell", "2"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["kl"]), 1);
    assert_eq!(code(&["kl", "--ell", "two"]), 1);
    assert_eq!(code(&["kl", "--ell", "0"]), 1);
    assert_eq!(code(&["inner-id", "--u", "1.5"]), 1);
    assert_eq!(code(&["expect", "--scheme", "palindromic-blocks", "--ell", "5", "--n", "6"]), 1);
    assert_eq!(code(&["expect", "--scheme", "banana", "--n", "6"]), 1);
}

#[test]
fn block_length_rules() {
    assert_eq!(code(&["expect", "--scheme", "iid", "--ell", "2", "--n", "10"]), 1);
    assert_eq!(code(&["expect", "--scheme", "palindromic-blocks", "--n", "10"]), 1);
    assert_eq!(code(&["expect", "--scheme", "contiguous-blocks", "--n", "10"]), 1);
    assert_eq!(code(&["expect", "--scheme", "iid", "--n", "10"]), 0);
}

#[test]
fn json_output_echoes_config() {
    let v = json(&["kl", "--ell", "3", "--json"]);
    assert_eq!(v["config"]["ell"], 3);
    let k = v["result"]["value"].as_f64().unwrap();
    assert!((k - 1.0408).abs() < 1e-3);

    let v = json(&["inner-id", "--u", "-0.7", "--json"]);
    assert!(v["result"]["deviation"].as_f64().unwrap().abs() < 1e-10);

    let v = json(&["expect", "--scheme", "palindromic-blocks", "--ell", "1", "--n", "40", "--json"]);
    assert_eq!(v["result"]["deterministic"], 40);

    let v = json(&["ilim", "--ell", "1", "--n", "10", "--json"]);
    assert_eq!(v["result"]["value"], 0.5);

    let v = json(&["schemes", "--ell", "2", "--n", "13", "--json"]);
    assert_eq!(v["result"]["decomposition"]["m"], 3);
    assert_eq!(v["result"]["decomposition"]["r"], 1);
    assert_eq!(v["result"]["index_map"]["free_count"], 8);
}

#[test]
fn text_output_starts_with_config_line() {
    let out = run(&["table1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config {"));
    assert_eq!(text.lines().count(), 2 + 8);
}

#[test]
fn mc_writes_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let read = |p: &Path| std::fs::read(p).unwrap();
    let mut runs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let sub = dir.path().join(format!("{i}"));
        std::fs::create_dir(&sub).unwrap();
        let out = sub.join("r.csv");
        let o = Command::new(BIN)
            .args(["mc", "--scheme", "iid", "--n", "100", "--trials", "10", "--seed", "1", "--out"])
            .arg(&out)
            .env("CZEROS_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((read(&out), read(&sub.join("r.json"))));
    }
    assert_eq!(runs[0], runs[1]);
    let csv = String::from_utf8(runs[0].0.clone()).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("trial,seed,n,ell,scheme,zero_count\n"));
    let summary: serde_json::Value = serde_json::from_slice(&runs[0].1).unwrap();
    assert_eq!(summary["per_trial_file"], "r.csv");
}

#[test]
fn mc_json_destination_and_bad_workers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.json");
    let o = run(&[
        "mc",
        "--scheme",
        "contiguous-blocks",
        "--ell",
        "2",
        "--n",
        "30",
        "--trials",
        "5",
        "--seed",
        "3",
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["comparison"]["mc_mean"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("summary.csv").exists());

    let o = run(&[
        "mc",
        "--scheme",
        "iid",
        "--n",
        "30",
        "--trials",
        "5",
        "--seed",
        "3",
        "--workers",
        "0",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn density_csv_marks_degenerate_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let v = json(&[
        "density",
        "--scheme",
        "palindromic-blocks",
        "--ell",
        "1",
        "--n",
        "4",
        "--points",
        "8",
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(v["result"]["points"], 8);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("x,value"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn unwritable_output_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("r.csv");
    assert_eq!(
        code(&["mc", "--scheme", "iid", "--n", "10", "--trials", "2", "--seed", "1", "--out", bad.to_str().unwrap()]),
        2
    );
}
