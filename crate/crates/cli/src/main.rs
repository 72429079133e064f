//! `ci4a`: run task suites against agents, compare them, inspect page views and issue
//! single tool calls.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ci4a_core::agent::{
    observe, run_episode, BackendKind, Env, EpisodeConfig, ObservationMode, PlanCache, RemoteConfig, Terminal,
    DEFAULT_RETRY_BOUND,
};
use ci4a_core::benchmark::{
    bucket_tasks, emit_report, load_page, load_suite, run_suite, Report, ReportFormat, RunConfig, TaskSpec,
};
use ci4a_core::component_model::Params;
use ci4a_core::page_tree::{build_hybrid_view, depth_stats, serialize_raw};
use ci4a_core::registry::Registry;
use clap::{Args, Parser, Subcommand};

/// Exit status for tool calls refused by the registry.
const EXIT_REJECTED: u8 = 1;
/// Exit status for configuration, fixture and I/O problems.
const EXIT_HARNESS: u8 = 2;

#[derive(Parser)]
#[command(name = "ci4a", version, about = "Component-interface agent benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one agent over a suite and write a report.
    Run {
        #[command(flatten)]
        common: RunArgs,
        /// Agent to run.
        #[arg(long, default_value = "semantic-first")]
        agent: String,
    },
    /// Run several agents over the same suite and print them side by side.
    Compare {
        #[command(flatten)]
        common: RunArgs,
        /// Comma-separated agents.
        #[arg(long, value_delimiter = ',', default_value = "semantic-first,atomic-baseline")]
        agents: Vec<String>,
    },
    /// Print the raw and hybrid views and depth statistics of a page.
    Inspect {
        /// Suite file, page fixture, or a directory of suite files.
        fixture: PathBuf,
        /// Also replay this task with an agent and show how both views evolve.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, default_value = "atomic-baseline")]
        agent: String,
        /// Observation mode to print alongside the raw view.
        #[arg(long, default_value = "structural")]
        mode: ObservationMode,
    },
    /// Issue one tool call on a freshly mounted page and print the result.
    Call {
        /// Suite file or page fixture.
        fixture: PathBuf,
        key: String,
        tool: String,
        /// Parameters as a JSON object.
        #[arg(default_value = "{}")]
        params: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Suite file or directory; defaults to the bundled corpus.
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus"))]
    suite: PathBuf,
    #[arg(long, default_value = "structural")]
    mode: ObservationMode,
    /// Per-atomic-event failure probability.
    #[arg(long, default_value_t = 0.0, value_parser = parse_noise)]
    noise: f64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step budget per episode.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Only run these task ids (comma-separated).
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    /// Skip the difficulty bucketing pass.
    #[arg(long)]
    no_buckets: bool,
    /// Keep every episode trace in the report file.
    #[arg(long)]
    traces: bool,
    /// Chat-completion endpoint for the remote agent.
    #[arg(long, env = "CI4A_ENDPOINT")]
    endpoint: Option<String>,
    #[arg(long, env = "CI4A_MODEL", default_value = "gpt-4o")]
    model: String,
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    /// Format printed on standard output.
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Structured report destination.
    #[arg(long, default_value = "./report.json")]
    output: PathBuf,
}

fn parse_noise(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

/// A harness failure: printed to stderr, exit status 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { common, agent } => cmd_run(&common, &[agent]),
        Command::Compare { common, agents } => cmd_run(&common, &agents),
        Command::Inspect {
            fixture,
            task,
            agent,
            mode,
        } => cmd_inspect(&fixture, task.as_deref(), &agent, mode),
        Command::Call {
            fixture,
            key,
            tool,
            params,
        } => cmd_call(&fixture, &key, &tool, &params),
    };
    match result {
        Ok(code) => code,
        Err(Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_HARNESS)
        }
    }
}

fn select_tasks(suite: Vec<TaskSpec>, ids: &[String]) -> Result<Vec<TaskSpec>, Fail> {
    if ids.is_empty() {
        return Ok(suite);
    }
    if let Some(missing) = ids.iter().find(|id| !suite.iter().any(|t| &t.id == *id)) {
        return Err(Fail(format!("no task `{missing}` in the suite")));
    }
    Ok(suite.into_iter().filter(|t| ids.contains(&t.id)).collect())
}

fn cmd_run(args: &RunArgs, agents: &[String]) -> Result<ExitCode, Fail> {
    let remote = args.endpoint.as_ref().map(|endpoint| RemoteConfig {
        endpoint: endpoint.clone(),
        model: args.model.clone(),
        timeout_ms: args.timeout_ms,
        api_key: std::env::var("CI4A_API_KEY").ok(),
    });
    // every name is checked before anything runs
    let kinds = agents
        .iter()
        .map(|a| BackendKind::parse(a, remote.as_ref()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail(format!("{e} (known: {})", BackendKind::NAMES.join(", "))))?;
    let mut suite = select_tasks(load_suite(&args.suite)?, &args.tasks)?;
    let plans = PlanCache::default();
    let bucketing = if args.no_buckets {
        None
    } else {
        Some(bucket_tasks(&mut suite, &BackendKind::AtomicBaseline, &plans)?)
    };
    let cfg = RunConfig {
        noise: args.noise,
        budget: args.budget as usize,
        trials: args.trials as usize,
        seed: args.seed,
        mode: args.mode,
        retry_bound: DEFAULT_RETRY_BOUND,
        keep_traces: args.traces,
    };
    let report = run_suite(&suite, &kinds, &cfg, &plans, bucketing.as_ref());
    write_report(&report, &args.output)?;
    let mut out = io::stdout().lock();
    emit_report(&report, args.format, &mut out)?;
    let broken: usize = report.agents.iter().map(|a| a.harness_errors).sum();
    if broken > 0 {
        return Err(Fail(format!("{broken} episodes could not be executed")));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_report(report: &Report, path: &Path) -> Result<(), Fail> {
    let mut buf = Vec::new();
    emit_report(report, ReportFormat::Structured, &mut buf)?;
    fs::write(path, buf).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn fixture_files(path: &Path) -> Result<Vec<PathBuf>, Fail> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| Fail(format!("{}: {e}", path.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_inspect(path: &Path, task: Option<&str>, agent: &str, mode: ObservationMode) -> Result<ExitCode, Fail> {
    let mut out = io::stdout().lock();
    for file in fixture_files(path)? {
        let page = load_page(&file)?;
        let env = Env::new(&page, 0.0, 0)?;
        let stats = depth_stats(env.tree());
        let hybrid = build_hybrid_view(env.tree(), env.registry())?;
        writeln!(out, "== {}", file.display())?;
        writeln!(
            out,
            "depth: max {} mean leaf {:.2} nodes {} hybrid nodes {}",
            stats.max_depth,
            stats.mean_leaf_depth,
            stats.node_count,
            hybrid.node_count()
        )?;
        writeln!(out, "-- raw view")?;
        write!(out, "{}", serialize_raw(env.tree()))?;
        writeln!(out, "-- {} view", mode_name(mode))?;
        write!(out, "{}", observe(&env, mode, 0, None).text)?;
        writeln!(out)?;
    }
    let Some(id) = task else {
        return Ok(ExitCode::SUCCESS);
    };
    let suite = load_suite(path)?;
    let t = suite
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Fail(format!("no task `{id}` in {}", path.display())))?;
    let kind = BackendKind::parse(agent, None)?;
    let mut backend = kind.build(&PlanCache::default(), DEFAULT_RETRY_BOUND);
    let (trace, _) = run_episode(t, backend.as_mut(), &EpisodeConfig::default())?;
    let actions = trace.actions();
    writeln!(out, "== {} with {}: {:?} in {} steps", t.id, kind.name(), trace.terminal, trace.step_count)?;
    writeln!(out, "{:>4}  {:>9}  {:>12}  action", "step", "raw nodes", "hybrid nodes")?;
    let mut env = Env::new(&t.page, 0.0, 0)?;
    let counts = |env: &Env| -> Result<(usize, usize), Fail> {
        Ok((depth_stats(env.tree()).node_count, build_hybrid_view(env.tree(), env.registry())?.node_count()))
    };
    let (raw, hy) = counts(&env)?;
    writeln!(out, "{:>4}  {raw:>9}  {hy:>12}  (start)", 0)?;
    for (i, a) in actions.iter().enumerate() {
        env.execute(a);
        let (raw, hy) = counts(&env)?;
        writeln!(out, "{:>4}  {raw:>9}  {hy:>12}  {a}", i + 1)?;
    }
    let ok = trace.terminal == Terminal::Success;
    writeln!(out, "oracle {}", if ok { "satisfied" } else { "not satisfied" })?;
    Ok(ExitCode::SUCCESS)
}

fn mode_name(mode: ObservationMode) -> &'static str {
    match mode {
        ObservationMode::Structural => "hybrid",
        ObservationMode::Som => "som",
        ObservationMode::Raw => "raw",
    }
}

fn cmd_call(path: &Path, key: &str, tool: &str, params: &str) -> Result<ExitCode, Fail> {
    let params: Params = serde_json::from_str(params).map_err(|e| Fail(format!("params: {e}")))?;
    let page = load_page(path)?;
    let mut registry = Registry::new();
    ci4a_core::page_tree::build_page(&page, &mut registry)?;
    let (body, code) = match registry.call_tool(key, tool, &params) {
        Ok(r) => (serde_json::to_string_pretty(&r)?, ExitCode::SUCCESS),
        Err(e) => (serde_json::to_string_pretty(&e)?, ExitCode::from(EXIT_REJECTED)),
    };
    writeln!(io::stdout().lock(), "{body}")?;
    Ok(code)
}
