use std::path::Path;
use std::process::{Command, Output};

use ufp_core::trace::{read_trace_file, read_verdict_file, verdict_path};

fn ufp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ufp")).args(args).output().expect("spawn ufp")
}

fn run_args<'a>(skeptic: &'a str, out: &'a str) -> Vec<&'a str> {
    vec!["run", "--forecaster", "powerlaw:c=1/2,p=2", "--skeptic", skeptic, "--rounds", "30", "--out", out]
}

#[test]
fn run_writes_trace_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("avoider.jsonl");
    let output = ufp(&run_args("avoider:eps=1e-6", out.to_str().unwrap()));
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(String::from_utf8_lossy(&output.stdout).contains("bankrupt_at=19"));

    let records = read_trace_file(&out).unwrap();
    assert_eq!(records.len(), 30);
    let doc = read_verdict_file(&verdict_path(&out)).unwrap();
    assert_eq!(doc.verdict.bankrupt_at, Some(19));
    assert!(doc.properties.all_hold());
}

#[test]
fn stop_on_bankruptcy_flag_truncates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let mut args = run_args("avoider:eps=1e-6", out.to_str().unwrap());
    args.push("--stop-on-bankruptcy");
    assert_eq!(ufp(&args).status.code(), Some(0));
    assert_eq!(read_trace_file(&out).unwrap().len(), 19);
}

#[test]
fn float_mode_and_alternate_policy_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let mut args = run_args("momentum:m=-3", out.to_str().unwrap());
    args.extend(["--mode", "float", "--sign-policy", "alternate"]);
    assert_eq!(ufp(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().all(|l| l.starts_with("{\"n\":")));
}

#[test]
fn config_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let out_str = out.to_str().unwrap();

    let output = ufp(&run_args("negv:v=-1/10", out_str));
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("NegativeQuadraticStake"));

    let output = ufp(&run_args("zero:extra", out_str));
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("position 4"));

    let mut args = run_args("zero", out_str);
    args.extend(["--variant", "sideways"]);
    assert_eq!(ufp(&args).status.code(), Some(2));

    assert!(!out.exists() && !verdict_path(&out).exists());
}

#[test]
fn modified_variant_punishes_negative_stakes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let mut args = run_args("negv:v=-1/10", out.to_str().unwrap());
    args.extend(["--variant", "modified"]);
    assert_eq!(ufp(&args).status.code(), Some(0));
    let doc = read_verdict_file(&verdict_path(&out)).unwrap();
    assert_eq!(doc.verdict.bankrupt_at, Some(1));
    assert!(doc.properties.all_hold());
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/t.jsonl");
    assert_eq!(ufp(&run_args("zero", out.to_str().unwrap())).status.code(), Some(3));
    let grid = dir.path().join("missing.json");
    assert_eq!(ufp(&["sweep", "--grid", grid.to_str().unwrap()]).status.code(), Some(3));
}

fn write_grid(dir: &Path, entries: &[(&str, &str)]) -> std::path::PathBuf {
    let configs: Vec<serde_json::Value> = entries
        .iter()
        .enumerate()
        .map(|(i, (skeptic, forecaster))| {
            serde_json::json!({
                "id": format!("g{i}"),
                "forecaster": forecaster,
                "skeptic": skeptic,
                "rounds": 40,
                "out": dir.join(format!("g{i}.jsonl")),
            })
        })
        .collect();
    let path = dir.join("grid.json");
    std::fs::write(&path, serde_json::to_string(&configs).unwrap()).unwrap();
    path
}

#[test]
fn sweep_writes_default_summary() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(
        dir.path(),
        &[("zero", "constant:c=1"), ("avoider:eps=1e-6", "powerlaw:c=1/2,p=2"), ("momentum:m=1", "constant:c=1")],
    );
    let output = ufp(&["sweep", "--grid", grid.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));

    let summary = std::fs::read_to_string(dir.path().join("grid.json.summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "id,max_capital,bankrupt_at,trigger_count,kolmogorov_sum");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("g0,1,,40,"));
    // Grids stop at bankruptcy by default.
    assert!(lines[2].starts_with("g1,") && lines[2].contains(",19,0,"));
    assert_eq!(read_trace_file(&dir.path().join("g1.jsonl")).unwrap().len(), 19);
    assert!(lines[3].starts_with("g2,") && lines[3].contains(",2,2,"));
}

#[test]
fn failing_sweep_writes_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(dir.path(), &[("zero", "constant:c=1"), ("negv:v=-1/10", "constant:c=1")]);
    let summary = dir.path().join("s.csv");
    let output = ufp(&["sweep", "--grid", grid.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!summary.exists());
    assert!(!dir.path().join("g0.jsonl").exists());
}
