//! End-to-end runs of the `xebstat` binary.

use std::process::{Command, Output};

use xebstat::cli::{execute, RunConfig};

fn xebstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xebstat")).args(args).output().expect("spawn xebstat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gate_info_reports_iswap_parameters() {
    let o = xebstat(&["gate-info", "--gate", "iswap", "--precision-bits", "128"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let alpha: f64 = v["alpha"].as_str().unwrap().parse().unwrap();
    let beta: f64 = v["beta"].as_str().unwrap().parse().unwrap();
    assert!((alpha - 10.0 / 9.0).abs() < 1e-15 && (beta - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(v["precision_bits"], 128);
    assert!(v["region"].as_str().unwrap().starts_with("on_boundary"));
}

#[test]
fn noise_info_for_depolarizing_channel() {
    let o = xebstat(&["noise-info", "--noise", "depol:0.01", "--format", "csv", "--mode", "fast"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert!(lines.next().unwrap().starts_with("noise,r,u,mu,gamma1,gamma2,delta2,epsilon"));
}

#[test]
fn configuration_errors_exit_with_2() {
    assert_eq!(xebstat(&["evolve", "--sites", "7"]).status.code(), Some(2));
    assert_eq!(xebstat(&["evolve", "--gate", "toffoli"]).status.code(), Some(2));
    assert_eq!(xebstat(&["evolve", "--noise", "depol:0.1", "--eps-n", "0.5"]).status.code(), Some(2));
    assert_eq!(xebstat(&["oracle-check", "--sites", "12"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "sites = 8\ncolour = blue\n").unwrap();
    assert_eq!(xebstat(&["evolve", "-c", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failed_oracle_exits_with_3() {
    let o = xebstat(&["oracle-check", "--geometry", "1d", "-n", "6", "--gate", "haar", "--eps-n", "0.3", "--trunc", "0.01"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn non_unital_two_copy_exits_with_4() {
    let o = xebstat(&["evolve", "-n", "8", "-d", "5", "--noise", "ampdamp:0.1", "--two-copy"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["evolve", "-n", "12", "-d", "15", "--eps-n", "0.5", "--precision-bits", "160"];
    let a = xebstat(&args);
    let b = xebstat(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(xebstat(&with_out).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# sweep input\ngeometry = a2a\nsites = 10\ngate = haar\neps_n = 0.4\ndepth = 12\n").unwrap();
    let cfg = RunConfig::load(&path).unwrap();
    let again = RunConfig::parse(&cfg.serialize()).unwrap();
    assert_eq!(cfg.serialize(), again.serialize());
    assert_eq!(cfg.hash("evolve"), again.hash("evolve"));

    let from_file = xebstat(&["evolve", "-c", path.to_str().unwrap()]);
    let from_flags = xebstat(&["evolve", "--geometry", "a2a", "-n", "10", "--gate", "haar", "--eps-n", "0.4", "-d", "12"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);

    let out = execute("evolve", &cfg).unwrap();
    assert_eq!(out.table.rows.len(), 13);
    let flag_override = xebstat(&["evolve", "-c", path.to_str().unwrap(), "-d", "3"]);
    assert_eq!(stdout(&flag_override).lines().count(), 2 + 4);
}

#[test]
fn spectrum_and_critical_tables() {
    let o = xebstat(&["spectrum", "-n", "20", "--eps-grid", "0.5,1.5", "-k", "3", "--mode", "fast"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().starts_with("eps_n,index,Lambda"));
    assert_eq!(text.lines().count(), 2 + 6);

    let o = xebstat(&["critical", "--alphas", "1,10/9", "--format", "json", "--mode", "fast"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let ec: f64 = rows[0][3].as_str().unwrap().parse().unwrap();
    assert!((ec - 2.5f64.ln()).abs() < 1e-12);
}
