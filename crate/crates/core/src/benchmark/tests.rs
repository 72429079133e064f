use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde_json::json;

use super::*;
use crate::agent::{replay, ActionCommand, BackendKind, Env, Terminal};
use crate::component_model::Category;
use crate::testkit::{corpus, plans, task};

const PAGE: &str = r#"{"tag": "body", "children": [
  {"component": {"key": "region", "widget": "Cascader", "props": {"options": [
    {"value": "a", "label": "A", "children": [{"value": "b", "label": "B"}]}
  ]}}}
]}"#;

fn suite_text(tasks: &str) -> String {
    format!("{{\"version\": 1, \"page\": {PAGE}, \"tasks\": [{tasks}]}}")
}

fn fixture_line(e: SuiteError) -> (usize, String) {
    match e {
        SuiteError::Fixture { line, message, .. } => (line, message),
        other => panic!("{other}"),
    }
}

fn run(agents: &[BackendKind], cfg: &RunConfig, suite: &[TaskSpec], bucketing: Option<&Bucketing>) -> Report {
    run_suite(suite, agents, cfg, &plans(), bucketing)
}

fn corpus_bucketing() -> &'static Bucketing {
    static B: std::sync::OnceLock<Bucketing> = std::sync::OnceLock::new();
    B.get_or_init(|| {
        let mut suite = corpus().to_vec();
        bucket_tasks(&mut suite, &BackendKind::AtomicBaseline, &plans()).unwrap()
    })
}

#[test]
fn corpus_spans_every_category() {
    let suite = corpus();
    assert!(suite.len() >= 20, "{}", suite.len());
    let mut cats = BTreeSet::new();
    for t in suite {
        let env = Env::new(&t.page, 0.0, 0).unwrap();
        for k in t.oracle_keys() {
            if let Some(c) = env.registry().get(&k) {
                cats.insert(c.kind().category);
            }
        }
    }
    assert_eq!(cats, BTreeSet::from([Category::Navigation, Category::DataEntry, Category::DataDisplay]));
}

#[test]
fn undeclared_key_is_reported_with_its_line() {
    let text = suite_text(
        r#"
  {"id": "fine", "instruction": "", "oracle": [{"key": "region", "path": "/value", "equals": ["a", "b"]}]},
  {"id": "broken", "instruction": "",
   "oracle": [{"key": "ghost", "path": "/value", "equals": 1}]}"#,
    );
    let (line, msg) = fixture_line(parse_suite(&text, Path::new("x.json")).unwrap_err());
    assert!(msg.contains("ghost"), "{msg}");
    let expected = text.lines().position(|l| l.contains("\"broken\"")).unwrap() + 1;
    assert_eq!(line, expected);
}

#[test]
fn malformed_suites_are_rejected() {
    let unknown_field = suite_text(r#"{"id": "t", "instruction": "", "oracle": [], "colour": 1}"#);
    let (line, msg) = fixture_line(parse_suite(&unknown_field, Path::new("x.json")).unwrap_err());
    assert!(line >= 1 && msg.contains("colour"), "{msg}");

    let empty_oracle = suite_text(r#"{"id": "t", "instruction": "", "oracle": []}"#);
    assert!(parse_suite(&empty_oracle, Path::new("x.json")).is_err());

    let bad_pointer = suite_text(r#"{"id": "t", "instruction": "", "oracle": [{"key": "region", "path": "value", "equals": 1}]}"#);
    assert!(parse_suite(&bad_pointer, Path::new("x.json")).is_err());

    let version = suite_text("").replace("\"version\": 1", "\"version\": 9");
    assert!(parse_suite(&version, Path::new("x.json")).is_err());
}

#[test]
fn directory_loading() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_suite(dir.path()).unwrap().is_empty());

    let one = suite_text(r#"{"id": "t", "instruction": "", "oracle": [{"key": "region", "path": "/value", "equals": ["a", "b"]}]}"#);
    fs::write(dir.path().join("a.json"), &one).unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let suite = load_suite(dir.path()).unwrap();
    assert_eq!(suite.len(), 1);
    assert_eq!(suite[0].source, dir.path().join("a.json"));

    fs::write(dir.path().join("b.json"), &one).unwrap();
    let (_, msg) = fixture_line(load_suite(dir.path()).unwrap_err());
    assert!(msg.contains("twice"), "{msg}");

    assert!(matches!(load_suite(&dir.path().join("missing.json")), Err(SuiteError::Io { .. })));
}

#[test]
fn oracle_checks() {
    let t = task("delivery-new-year-eve");
    let mut env = Env::new(&t.page, 0.0, 0).unwrap();
    assert!(!check_oracle(&env, &t.oracle));
    env.execute(&ActionCommand::call(
        "datepicker",
        "setValue",
        serde_json::from_value(json!({"value": "2025-12-31"})).unwrap(),
    ));
    assert!(check_oracle(&env, &t.oracle));

    let r = task("region-westlake");
    assert!(!check_oracle(&Env::new(&r.page, 0.0, 0).unwrap(), &r.oracle));

    let ghost = [Assertion::State {
        key: "ghost".into(),
        path: "/value".into(),
        equals: json!(null),
    }];
    assert!(!check_oracle(&env, &ghost));
    assert!(check_oracle(&env, &[]));
}

#[test]
fn buckets_follow_the_baseline() {
    let b = corpus_bucketing();
    assert_eq!(b.bucket_of("region-westlake"), Some(Bucket::Short));
    assert_eq!(b.steps["region-westlake"], 4);
    assert_eq!(b.bucket_of("signup-complete"), Some(Bucket::Long));
    assert_eq!(b.steps["signup-complete"], 12);
    assert!(b.unsolvable.is_empty());
    // buckets partition the suite
    assert_eq!(b.buckets.len(), corpus().len());
    assert!(Bucket::ALL.iter().all(|k| b.count(*k) > 0));

    let mut suite = corpus().to_vec();
    assert!(matches!(
        bucket_tasks(&mut suite, &BackendKind::SemanticFirst, &plans()),
        Err(BenchError::NotAtomicBaseline(_))
    ));
}

#[test]
fn bucket_boundaries() {
    let got: Vec<_> = [0, 1, 5, 6, 10, 11, 30].into_iter().map(Bucket::from_steps).collect();
    use Bucket::*;
    assert_eq!(got, [None, Some(Short), Some(Short), Some(Medium), Some(Medium), Some(Long), Some(Long)]);
}

#[test]
fn unsolvable_tasks_are_flagged_and_left_out() {
    let text = suite_text(r#"{"id": "impossible", "instruction": "", "oracle": [{"key": "region", "path": "/value", "equals": ["z"]}]}"#);
    let mut suite = parse_suite(&text, Path::new("x.json")).unwrap();
    let b = bucket_tasks(&mut suite, &BackendKind::AtomicBaseline, &plans()).unwrap();
    assert_eq!(b.unsolvable, ["impossible"]);
    assert!(b.buckets.is_empty());
    assert_eq!(suite[0].bucket_baseline_steps, None);
}

#[test]
fn semantic_is_shorter_on_every_multi_step_task() {
    let agents = [BackendKind::SemanticFirst, BackendKind::AtomicBaseline];
    let r = run(&agents, &RunConfig::default(), corpus(), Some(corpus_bucketing()));
    let sem = r.agent("semantic-first").unwrap();
    let base = r.agent("atomic-baseline").unwrap();
    assert_eq!(sem.success_rate, 1.0);
    assert_eq!(base.success_rate, 1.0);
    for (s, b) in sem.tasks.iter().zip(&base.tasks) {
        assert_eq!(s.task_id, b.task_id);
        let bs = b.average_steps.unwrap();
        let ss = s.average_steps.unwrap();
        if bs > 1.0 {
            assert!(ss < bs, "{}: {ss} vs {bs}", s.task_id);
        } else {
            assert!(ss <= bs, "{}", s.task_id);
        }
    }
    assert!(sem.average_steps.unwrap() < base.average_steps.unwrap());
    assert!(sem.action_distribution["semantic_call"] > 0);
    assert!(!base.action_distribution.contains_key("semantic_call"));
}

#[test]
fn empty_agent_list_gives_empty_report() {
    let r = run(&[], &RunConfig::default(), corpus(), None);
    assert!(r.agents.is_empty());
    let mut out = Vec::new();
    emit_report(&r, ReportFormat::TextTable, &mut out).unwrap();
    assert!(String::from_utf8(out).unwrap().contains("no agents"));
}

#[test]
fn step_accounting_matches_raw_traces() {
    let cfg = RunConfig {
        noise: 0.1,
        trials: 20,
        seed: 3,
        keep_traces: true,
        ..RunConfig::default()
    };
    let suite: Vec<TaskSpec> = ["region-westlake", "pager-13", "travel-august"].iter().map(|i| task(i).clone()).collect();
    let r = run(&[BackendKind::AtomicBaseline], &cfg, &suite, None);
    let a = &r.agents[0];
    assert_eq!(a.traces.len(), 60);
    let ok: Vec<usize> = a.traces.iter().filter(|t| t.terminal == Terminal::Success).map(|t| t.step_count).collect();
    assert_eq!(a.successes, ok.len());
    let mean = ok.iter().sum::<usize>() as f64 / ok.len() as f64;
    assert!((a.average_steps.unwrap() - mean).abs() < 1e-12);
    let all = a.traces.iter().map(|t| t.step_count).sum::<usize>() as f64 / 60.0;
    assert!((a.average_steps_all.unwrap() - all).abs() < 1e-12);
    let actions: usize = a.action_distribution.values().sum();
    let stops = a.traces.iter().filter(|t| t.stopped).count();
    assert_eq!(actions, a.traces.iter().map(|t| t.step_count).sum::<usize>() + stops);

    // same seed, same report
    assert_eq!(run(&[BackendKind::AtomicBaseline], &cfg, &suite, None), r);
}

#[test]
fn baseline_success_falls_with_noise() {
    let suite: Vec<TaskSpec> = ["travel-august", "pager-13", "signup-minimal"].iter().map(|i| task(i).clone()).collect();
    let sr = |noise| {
        let cfg = RunConfig {
            noise,
            trials: 500,
            seed: 11,
            ..RunConfig::default()
        };
        run(&[BackendKind::AtomicBaseline], &cfg, &suite, None).agents[0].success_rate
    };
    let rates: Vec<f64> = [0.0, 0.02, 0.05, 0.1].into_iter().map(sr).collect();
    assert_eq!(rates[0], 1.0);
    let n = 1500.0;
    for w in rates.windows(2) {
        let sigma = (w[1] * (1.0 - w[1]) / n).sqrt();
        assert!(w[0] + 2.0 * sigma >= w[1], "{rates:?}");
    }
    assert!(rates[3] < rates[1]);
}

#[test]
fn semantic_only_episodes_ignore_noise() {
    let clean = run(&[BackendKind::SemanticFirst], &RunConfig { keep_traces: true, ..RunConfig::default() }, corpus(), None);
    let semantic_only: Vec<TaskSpec> = clean.agents[0]
        .traces
        .iter()
        .filter(|t| t.actions().iter().all(|a| matches!(a, ActionCommand::SemanticCall { .. })))
        .map(|t| task(&t.task_id).clone())
        .collect();
    assert!(semantic_only.len() >= 15);
    let strip = |r: Report| -> Vec<(String, Terminal, usize, serde_json::Value)> {
        r.agents[0]
            .traces
            .iter()
            .map(|t| (t.task_id.clone(), t.terminal, t.step_count, t.final_state.clone()))
            .collect()
    };
    let base = RunConfig {
        keep_traces: true,
        trials: 3,
        ..RunConfig::default()
    };
    let quiet = strip(run(&[BackendKind::SemanticFirst], &base, &semantic_only, None));
    for noise in [0.3, 1.0] {
        let noisy = strip(run(&[BackendKind::SemanticFirst], &RunConfig { noise, ..base }, &semantic_only, None));
        assert_eq!(noisy, quiet);
    }
}

#[test]
fn kept_traces_replay_to_their_final_state() {
    let cfg = RunConfig {
        keep_traces: true,
        ..RunConfig::default()
    };
    let r = run(&[BackendKind::AtomicBaseline, BackendKind::ScriptedOracle], &cfg, corpus(), None);
    for a in &r.agents {
        for t in &a.traces {
            let env = replay(task(&t.task_id), &t.actions()).unwrap();
            assert_eq!(env.fingerprint(), t.final_state, "{} {}", a.agent, t.task_id);
        }
    }
}

#[test]
fn reports_render_and_round_trip() {
    let agents = [BackendKind::SemanticFirst, BackendKind::AtomicBaseline];
    let suite: Vec<TaskSpec> = ["region-westlake", "pager-13", "travel-november"].iter().map(|i| task(i).clone()).collect();
    let mut bsuite = suite.clone();
    let b = bucket_tasks(&mut bsuite, &BackendKind::AtomicBaseline, &plans()).unwrap();
    let r = run(&agents, &RunConfig::default(), &suite, Some(&b));

    let mut json_out = Vec::new();
    emit_report(&r, ReportFormat::Structured, &mut json_out).unwrap();
    let back = parse_report(std::str::from_utf8(&json_out).unwrap()).unwrap();
    assert_eq!(back, r);

    let table = render_table(&r);
    let header = table.lines().find(|l| l.starts_with("Framework")).unwrap();
    assert!(header.contains("SR (%)") && header.contains("Average Steps"));
    let rows: Vec<&str> = table
        .lines()
        .skip_while(|l| !l.starts_with("Framework"))
        .skip(1)
        .take_while(|l| !l.starts_with("Average Steps counts"))
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("semantic-first") && rows[0].contains("100.0"));
    assert!(table.contains("SR (%) by bucket"));
    assert!(table.contains("Long >10 (n=1)"));

    let no_buckets = render_table(&run(&agents, &RunConfig::default(), &suite, None));
    assert!(!no_buckets.contains("by bucket"));

    let mut v: serde_json::Value = serde_json::from_slice(&json_out).unwrap();
    v["version"] = json!(99);
    assert!(matches!(parse_report(&v.to_string()), Err(ReportError::Version(99))));
}

#[test]
fn trial_seeds_are_stable_and_distinct() {
    assert_eq!(trial_seed(5, 2, 7), trial_seed(5, 2, 7));
    let seeds: BTreeSet<u64> = (0..10).flat_map(|i| (0..50).map(move |k| trial_seed(5, i, k))).collect();
    assert_eq!(seeds.len(), 500);
    assert_ne!(trial_seed(5, 0, 0), trial_seed(6, 0, 0));
}

#[test]
fn scripted_episode_config_is_echoed() {
    let cfg = RunConfig {
        noise: 0.25,
        budget: 12,
        trials: 2,
        seed: 9,
        ..RunConfig::default()
    };
    let r = run(&[BackendKind::ScriptedOracle], &cfg, &corpus()[..2], None);
    assert_eq!(r.config, cfg);
    assert_eq!(r.version, REPORT_VERSION);
    assert_eq!(r.agents[0].episodes, 4);
}
