use std::collections::BTreeMap;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TaskSpec;
use crate::agent::{
    run_episode, BackendKind, EpisodeConfig, EpisodeTrace, ObservationMode, PlanCache, Terminal, DEFAULT_BUDGET,
    DEFAULT_RETRY_BOUND,
};

pub const REPORT_VERSION: u32 = 1;

/// Difficulty class by the length of the atomic baseline's solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bucket {
    Short,
    Medium,
    Long,
}

impl Bucket {
    pub const ALL: [Bucket; 3] = [Bucket::Short, Bucket::Medium, Bucket::Long];

    /// `None` for zero steps: a task already solved on load has no difficulty.
    pub fn from_steps(steps: usize) -> Option<Bucket> {
        match steps {
            0 => None,
            1..=5 => Some(Bucket::Short),
            6..=10 => Some(Bucket::Medium),
            _ => Some(Bucket::Long),
        }
    }

    pub fn range(self) -> &'static str {
        match self {
            Bucket::Short => "1-5",
            Bucket::Medium => "6-10",
            Bucket::Long => ">10",
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bucketing {
    /// Baseline step count per solvable task.
    pub steps: BTreeMap<String, usize>,
    pub buckets: BTreeMap<String, Bucket>,
    /// Tasks the baseline could not solve without noise; they sit outside every bucket.
    pub unsolvable: Vec<String>,
}

impl Bucketing {
    pub fn bucket_of(&self, task: &str) -> Option<Bucket> {
        self.buckets.get(task).copied()
    }

    pub fn count(&self, b: Bucket) -> usize {
        self.buckets.values().filter(|x| **x == b).count()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("buckets are defined by an atomic-only baseline, not `{0}`")]
    NotAtomicBaseline(String),
}

/// Tags each task with the step count of a noise-free run of `baseline` and fills
/// `bucket_baseline_steps`.
pub fn bucket_tasks(suite: &mut [TaskSpec], baseline: &BackendKind, plans: &PlanCache) -> Result<Bucketing, BenchError> {
    if !baseline.is_atomic_only() {
        return Err(BenchError::NotAtomicBaseline(baseline.name().to_string()));
    }
    let cfg = EpisodeConfig::default();
    let results: Vec<(usize, Option<usize>)> = suite
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut b = baseline.build(plans, cfg.retry_bound);
            let steps = match run_episode(t, b.as_mut(), &cfg) {
                Ok((tr, _)) if tr.terminal == Terminal::Success => Some(tr.step_count),
                _ => None,
            };
            (i, steps)
        })
        .collect();
    let mut out = Bucketing::default();
    for (i, steps) in results {
        let t = &mut suite[i];
        t.bucket_baseline_steps = steps;
        match steps.and_then(|n| Bucket::from_steps(n).map(|b| (n, b))) {
            Some((n, b)) => {
                out.steps.insert(t.id.clone(), n);
                out.buckets.insert(t.id.clone(), b);
            }
            None => {
                log::warn!("task {} is not solvable by {}", t.id, baseline.name());
                out.unsolvable.push(t.id.clone());
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub noise: f64,
    pub budget: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: ObservationMode,
    pub retry_bound: usize,
    /// Keep every episode trace in the report.
    #[serde(default)]
    pub keep_traces: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            noise: 0.0,
            budget: DEFAULT_BUDGET,
            trials: 1,
            seed: 0,
            mode: ObservationMode::Structural,
            retry_bound: DEFAULT_RETRY_BOUND,
            keep_traces: false,
        }
    }
}

/// Seed for one trial of one task. Independent of the agent, so every agent faces the
/// same noise draws, and of scheduling order.
pub fn trial_seed(base: u64, task_index: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(task_index as u64);
    rng.set_word_pos(trial as u128 * 2);
    rng.next_u64()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskStats {
    pub task_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket: Option<Bucket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_steps: Option<usize>,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average_steps: Option<f64>,
    pub terminals: BTreeMap<String, usize>,
    pub backend_errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub tasks: usize,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentReport {
    pub agent: String,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean step count over successful episodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average_steps: Option<f64>,
    /// Mean step count over every episode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average_steps_all: Option<f64>,
    pub action_distribution: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub buckets: BTreeMap<Bucket, BucketStats>,
    pub tasks: Vec<TaskStats>,
    /// Episodes that could not be started.
    #[serde(default)]
    pub harness_errors: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<EpisodeTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub config: RunConfig,
    pub agents: Vec<AgentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucketing: Option<Bucketing>,
}

impl Report {
    pub fn agent(&self, name: &str) -> Option<&AgentReport> {
        self.agents.iter().find(|a| a.agent == name)
    }
}

fn mean(xs: impl Iterator<Item = usize>) -> Option<f64> {
    let (n, sum) = xs.fold((0usize, 0usize), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| sum as f64 / n as f64)
}

fn rate(successes: usize, episodes: usize) -> f64 {
    if episodes == 0 {
        0.0
    } else {
        successes as f64 / episodes as f64
    }
}

fn terminal_name(t: Terminal) -> &'static str {
    match t {
        Terminal::Success => "success",
        Terminal::Failure => "failure",
        Terminal::BudgetExhausted => "budget_exhausted",
    }
}

/// Aggregates raw traces for one agent. `None` entries are episodes that never started.
pub fn summarize(
    agent: &str,
    suite: &[TaskSpec],
    traces: Vec<Option<EpisodeTrace>>,
    bucketing: Option<&Bucketing>,
    keep_traces: bool,
) -> AgentReport {
    let harness_errors = traces.iter().filter(|t| t.is_none()).count();
    let traces: Vec<EpisodeTrace> = traces.into_iter().flatten().collect();
    fn ok(t: &&EpisodeTrace) -> bool {
        t.terminal == Terminal::Success
    }

    let mut action_distribution = BTreeMap::new();
    for t in &traces {
        for s in &t.steps {
            *action_distribution.entry(s.action.variant().to_string()).or_insert(0) += 1;
        }
        if t.stopped {
            *action_distribution.entry("stop".to_string()).or_insert(0) += 1;
        }
    }

    let tasks: Vec<TaskStats> = suite
        .iter()
        .map(|task| {
            let mine: Vec<&EpisodeTrace> = traces.iter().filter(|t| t.task_id == task.id).collect();
            let successes = mine.iter().filter(|t| ok(t)).count();
            let mut terminals = BTreeMap::new();
            for t in &mine {
                *terminals.entry(terminal_name(t.terminal).to_string()).or_insert(0) += 1;
            }
            TaskStats {
                task_id: task.id.clone(),
                bucket: bucketing.and_then(|b| b.bucket_of(&task.id)),
                baseline_steps: bucketing.and_then(|b| b.steps.get(&task.id).copied()),
                episodes: mine.len(),
                successes,
                success_rate: rate(successes, mine.len()),
                average_steps: mean(mine.iter().filter(|t| ok(t)).map(|t| t.step_count)),
                terminals,
                backend_errors: mine.iter().map(|t| t.backend_errors).sum(),
            }
        })
        .collect();

    let mut buckets = BTreeMap::new();
    if let Some(b) = bucketing {
        for bucket in Bucket::ALL {
            let members: Vec<&TaskStats> = tasks.iter().filter(|t| b.bucket_of(&t.task_id) == Some(bucket)).collect();
            if members.is_empty() {
                continue;
            }
            let episodes = members.iter().map(|t| t.episodes).sum();
            let successes = members.iter().map(|t| t.successes).sum();
            buckets.insert(
                bucket,
                BucketStats {
                    tasks: members.len(),
                    episodes,
                    successes,
                    success_rate: rate(successes, episodes),
                },
            );
        }
    }

    let successes = traces.iter().filter(ok).count();
    AgentReport {
        agent: agent.to_string(),
        episodes: traces.len(),
        successes,
        success_rate: rate(successes, traces.len()),
        average_steps: mean(traces.iter().filter(ok).map(|t| t.step_count)),
        average_steps_all: mean(traces.iter().map(|t| t.step_count)),
        action_distribution,
        buckets,
        tasks,
        harness_errors,
        traces: if keep_traces { traces } else { Vec::new() },
    }
}

/// Runs every agent on every task `trials` times, in parallel.
pub fn run_suite(
    suite: &[TaskSpec],
    agents: &[BackendKind],
    cfg: &RunConfig,
    plans: &PlanCache,
    bucketing: Option<&Bucketing>,
) -> Report {
    let agents = agents
        .iter()
        .map(|kind| {
            let jobs: Vec<(usize, usize)> =
                (0..suite.len()).flat_map(|i| (0..cfg.trials).map(move |k| (i, k))).collect();
            let traces: Vec<Option<EpisodeTrace>> = jobs
                .into_par_iter()
                .map(|(i, k)| {
                    let ep = EpisodeConfig {
                        mode: cfg.mode,
                        budget: cfg.budget,
                        noise: cfg.noise,
                        seed: trial_seed(cfg.seed, i, k),
                        retry_bound: cfg.retry_bound,
                    };
                    let mut backend = kind.build(plans, cfg.retry_bound);
                    match run_episode(&suite[i], backend.as_mut(), &ep) {
                        Ok((trace, _)) => Some(trace),
                        Err(e) => {
                            log::error!("{}: {} trial {k}: {e}", kind.name(), suite[i].id);
                            None
                        }
                    }
                })
                .collect();
            summarize(kind.name(), suite, traces, bucketing, cfg.keep_traces)
        })
        .collect();
    Report {
        version: REPORT_VERSION,
        config: *cfg,
        agents,
        bucketing: bucketing.cloned(),
    }
}
