use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kout")).args(args).output().unwrap()
}

fn kout_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kout"))
        .args(args)
        .env("KOUT_THREADS", threads)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn kstar_default_table() {
    let o = kout(&["kstar"]);
    assert!(o.status.success());
    let expected = "mu_tilde,k_star\n0.1,5\n0.2,4\n0.3,4\n0.4,4\n0.5,3\n0.6,3\n0.7,5\n0.8,13\n0.9,43\n0.95,117\n";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn kstar_json_and_bad_input() {
    let o = kout(&["kstar", "--mu-tilde", "0.9", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["k_star"], 43);
    let o = kout(&["kstar", "--mu-tilde", "1.2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_json_is_machine_clean() {
    let o = kout(&["simulate", "--n", "2", "--mu", "1.0", "--k", "1", "--trials", "100", "--seed", "7"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["empirical_p_connected"], 1.0);
    assert!(stderr(&o).contains("configurations done"));
}

#[test]
fn unknown_flag_prints_usage_and_exits_one() {
    let o = kout(&["simulate", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("Usage"));
    let o = kout(&["nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validation_error_exits_one() {
    let o = kout(&["simulate", "--n", "5", "--mu", "1", "--k", "5", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let o = kout(&["simulate", "--n", "5", "--mu", "1", "--k", "1", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = kout(&["oracle", "--n", "15", "--mu", "1", "--k", "7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn io_errors_exit_two() {
    let o = kout(&["bounds", "--n", "10", "--mu", "1", "--k", "2", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kout(&["simulate", "--config", "/nonexistent-dir/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"params": {"n": 30, "mu": [0.5, 0.5], "k": [1, 2]}, "trials": 50, "master_seed": 3,
            "confidence_level": 0.9, "outputs": ["connectivity"]}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = kout(&["simulate", "--quiet", "--config", cfg, "--trials", "80"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stderr.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["trials"], 80);
    assert_eq!(v["master_seed"], 3);
    assert_eq!(v["confidence_level"], 0.9);
    assert_eq!(v["params"]["n"], 30);
    assert!(v.get("mean_y").is_none());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 30, "mu": [1.0], "k": [1], "bogus": 1}"#).unwrap();
    let o = kout(&["bounds", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_csv_schema_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = kout(&[
        "sweep", "--n", "100", "--mu", "0.9,0.06,0.04", "--k", "1,2,3", "--vary", "k-max", "--from", "3",
        "--to", "5", "--trials", "200", "--quiet", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header.join(","),
        "n,mu,k,trials,seed,p_connected,ci_low,ci_high,mean_y,p_y_zero,upper_bound,lower_bound,lower_bound_valid,second_moment_bound,union_bound"
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[2][2], "1;2;5");
    assert_eq!(&rows[0][1], "0.9;0.06;0.04");
    let p: f64 = rows[0][5].parse().unwrap();
    let lo: f64 = rows[0][6].parse().unwrap();
    let hi: f64 = rows[0][7].parse().unwrap();
    assert!(lo <= p && p <= hi);
}

#[test]
fn sweep_without_range_is_rejected() {
    let o = kout(&["sweep", "--n", "100", "--mu", "1", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--vary"));
}

fn figure1_args(out: &Path, format: &str) -> Vec<String> {
    ["figure1", "--trials", "300", "--k3-to", "6", "--quiet", "--format", format, "--out"]
        .iter()
        .map(|s| s.to_string())
        .chain([out.to_str().unwrap().to_string()])
        .collect()
}

#[test]
fn figure1_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("one.{format}"));
        let b = dir.path().join(format!("four.{format}"));
        let args_a = figure1_args(&a, format);
        let args_b = figure1_args(&b, format);
        let args_a: Vec<&str> = args_a.iter().map(String::as_str).collect();
        let args_b: Vec<&str> = args_b.iter().map(String::as_str).collect();
        assert!(kout_env(&args_a, "1").status.success());
        assert!(kout_env(&args_b, "4").status.success());
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{format}");
    }
    let csv = fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("1000,0.9;0.06;0.04,1;2;3,300,1,"));
}

#[test]
fn bounds_and_oracle_json() {
    let o = kout(&["bounds", "--n", "1000", "--mu", "0.9,0.06,0.04", "--k", "1,2,3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["upper_bound_asymptotic"].as_f64().unwrap() - 0.960223).abs() < 1e-6);
    assert!((v["c_value"].as_f64().unwrap() - 0.039777).abs() < 1e-6);

    let o = kout(&["oracle", "--n", "4", "--mu", "1", "--k", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p_connected"]["exact"], "26/27");
    assert_eq!(v["state_count"], 81);
}

#[test]
fn dump_round_trips_through_reader() {
    let o = kout(&["dump", "--n", "12", "--mu", "0.5,0.5", "--k", "1,3", "--seed", "4", "--trial", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let p = kout_core::ModelParams::new(12, vec![0.5, 0.5], vec![1, 3]).unwrap();
    let g = kout_core::dump::read_graph(&text, &p).unwrap();
    assert_eq!(g, kout_core::build_graph(&p, kout_core::SeedSpec::new(4, 2)));
}

#[test]
fn help_and_version_exit_zero() {
    let o = kout(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("figure1"));
    assert!(kout(&["--version"]).status.success());
}
