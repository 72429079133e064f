use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ci4a_core::benchmark::{parse_report, Report};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus")
}

fn ci4a(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ci4a"))
        .args(args)
        .env_remove("CI4A_ENDPOINT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_to(dir: &Path, args: &[&str]) -> (Output, Option<Report>) {
    let out = dir.join("report.json");
    let mut all = args.to_vec();
    all.extend(["--output", out.to_str().unwrap()]);
    let o = ci4a(&all);
    let report = std::fs::read_to_string(&out).ok().map(|t| parse_report(&t).unwrap());
    (o, report)
}

#[test]
fn call_accepts_the_canonical_date() {
    let page = corpus().join("02-delivery.json");
    let o = ci4a(&["call", page.to_str().unwrap(), "datepicker", "setValue", r#"{"value":"2025-12-31"}"#]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("\"value\": \"2025-12-31\""));
}

#[test]
fn call_prints_structured_errors() {
    let page = corpus().join("02-delivery.json");
    let o = ci4a(&["call", page.to_str().unwrap(), "datepicker", "setValue", r#"{"value":"2025/12/31"}"#]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["code"], "ParameterViolation");
    assert_eq!(v["detail"]["param"], "value");

    let o = ci4a(&["call", page.to_str().unwrap(), "nobody", "setValue"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("InvalidKey"));

    let o = ci4a(&["call", page.to_str().unwrap(), "datepicker", "setValue", "not json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_semantic_first_solves_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_to(dir.path(), &["run", "--agent", "semantic-first", "--suite", corpus().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report.unwrap();
    assert_eq!(r.agents.len(), 1);
    assert_eq!(r.agents[0].success_rate, 1.0);
    assert!(r.bucketing.is_some());
    let table = stdout(&o);
    assert!(table.contains("Framework") && table.contains("semantic-first") && table.contains("100.0"));
    assert!(table.contains("by bucket"));
}

#[test]
fn config_errors_exit_before_running() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--noise", "1.5"][..],
        &["run", "--budget", "0"],
        &["compare", "--agents", "semantic-first,imaginary"],
        &["run", "--agent", "remote"],
        &["run", "--suite", "/nonexistent/suite"],
        &["run", "--tasks", "no-such-task"],
    ] {
        let (o, report) = run_to(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty());
        assert!(report.is_none(), "{args:?} wrote a report");
    }
}

#[test]
fn budget_one_exhausts_on_a_long_task() {
    let dir = tempfile::tempdir().unwrap();
    let (o, report) = run_to(
        dir.path(),
        &["run", "--agent", "atomic-baseline", "--budget", "1", "--tasks", "travel-new-year-eve", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report.unwrap();
    let t = &r.agents[0].tasks[0];
    assert_eq!(t.terminals.get("budget_exhausted"), Some(&1));
    assert_eq!(r.agents[0].success_rate, 0.0);
    // stdout carries the same structured report
    assert_eq!(parse_report(&stdout(&o)).unwrap(), r);
}

#[test]
fn compare_prints_one_row_per_agent_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "compare",
        "--agents",
        "semantic-first,atomic-baseline,scripted-oracle",
        "--noise",
        "0.1",
        "--trials",
        "5",
        "--seed",
        "17",
        "--tasks",
        "region-westlake,pager-13,travel-august",
    ];
    let (o, report) = run_to(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = stdout(&o);
    for name in ["semantic-first", "atomic-baseline", "scripted-oracle"] {
        assert_eq!(table.lines().filter(|l| l.starts_with(name) && l.contains('.')).count(), 2, "{name}\n{table}");
    }
    let (o2, again) = run_to(dir.path(), &args);
    assert_eq!(stdout(&o2), table);
    assert_eq!(again, report);
}

#[test]
fn remote_endpoint_comes_from_the_environment() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_ci4a"))
        .args(["run", "--agent", "remote", "--tasks", "back-to-shop", "--no-buckets", "--timeout-ms", "500"])
        .args(["--output", out.to_str().unwrap()])
        .env("CI4A_ENDPOINT", &endpoint)
        .output()
        .unwrap();
    // an unreachable model is a task failure, not a harness error
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = parse_report(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r.agents[0].agent, "remote");
    assert_eq!(r.agents[0].success_rate, 0.0);
    assert!(r.agents[0].tasks[0].backend_errors > 0);
}

#[test]
fn inspect_shows_constant_hybrid_size() {
    let page = corpus().join("01-region.json");
    let o = ci4a(&["inspect", page.to_str().unwrap(), "--task", "region-westlake"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("-- raw view") && text.contains("-- hybrid view"));
    let rows: Vec<(usize, usize)> = text
        .lines()
        .skip_while(|l| !l.trim_start().starts_with("step"))
        .skip(1)
        .take_while(|l| !l.starts_with("oracle"))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.1 == rows[0].1));
    assert!(rows.iter().any(|r| r.0 > rows[0].0));
    assert!(text.contains("oracle satisfied"));
}

#[test]
fn inspect_reports_depth_for_every_fixture() {
    let o = ci4a(&["inspect", corpus().to_str().unwrap(), "--mode", "som"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let files = std::fs::read_dir(corpus()).unwrap().count();
    assert_eq!(text.lines().filter(|l| l.starts_with("depth: max")).count(), files);
    assert!(text.contains("-- som view"));
}

#[test]
fn inspect_unknown_path_fails() {
    let o = ci4a(&["inspect", "/no/such/fixture.json"]);
    assert_eq!(o.status.code(), Some(2));
}
