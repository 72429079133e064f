//! Hybrid-action agent: observations in several modes, a decide/execute/reflect loop and
//! pluggable decision backends that prefer semantic tool calls over atomic events.

mod backend;
mod env;
mod planner;
mod remote;
mod repair;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use backend::{Backend, BackendKind, GreedyAtomicBaseline, ScriptedOracle, SemanticFirstHeuristic};
pub use env::Env;
pub use planner::{shortest_atomic_plan, PlanCache, PlanStep, DEFAULT_STATE_LIMIT};
pub use remote::{RemoteBackend, RemoteConfig};
pub use repair::repair_params;

use crate::benchmark::{check_oracle, TaskSpec};
use crate::component_model::{AtomicError, AtomicEvent, AtomicResult, ComponentKey, Params, ToolResult};
use crate::page_tree::{
    build_hybrid_view, serialize_hybrid, serialize_raw, serialize_som, som_annotate, HybridNode, HybridTree,
    PageError, PageTree, SomView,
};
use crate::registry::{SemanticTriplet, StructuredError};

pub const DEFAULT_BUDGET: usize = 30;
pub const DEFAULT_RETRY_BOUND: usize = 2;

/// One step of the hybrid action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum ActionCommand {
    #[serde(rename = "call")]
    SemanticCall {
        key: ComponentKey,
        tool: String,
        #[serde(default)]
        params: Params,
    },
    Atomic {
        event: AtomicEvent,
    },
    Stop {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        answer: Option<String>,
    },
}

impl ActionCommand {
    pub fn call(key: &str, tool: &str, params: Params) -> Self {
        ActionCommand::SemanticCall {
            key: key.into(),
            tool: tool.into(),
            params,
        }
    }

    pub fn stop() -> Self {
        ActionCommand::Stop { answer: None }
    }

    /// Bucket name used in action distributions.
    pub fn variant(&self) -> &'static str {
        match self {
            ActionCommand::SemanticCall { .. } => "semantic_call",
            ActionCommand::Atomic { event } => event.verb.name(),
            ActionCommand::Stop { .. } => "stop",
        }
    }
}

impl fmt::Display for ActionCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionCommand::SemanticCall { key, tool, params } => {
                write!(f, "call({key}, {tool}, {})", Value::Object(params.clone()))
            }
            ActionCommand::Atomic { event } => write!(f, "{event}"),
            ActionCommand::Stop { answer: Some(a) } => write!(f, "stop({a:?})"),
            ActionCommand::Stop { answer: None } => f.write_str("stop"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservationMode {
    /// Hybrid view: layout plus one semantic node per component.
    #[default]
    Structural,
    /// Numbered element list with per-element triplet blocks.
    Som,
    /// The raw rendered page without semantic information.
    Raw,
}

impl FromStr for ObservationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "structural" => Ok(ObservationMode::Structural),
            "som" => Ok(ObservationMode::Som),
            "raw" => Ok(ObservationMode::Raw),
            _ => Err(format!("unknown mode `{s}` (expected structural, som or raw)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum View {
    Hybrid(HybridTree),
    Som(SomView),
    Raw(PageTree),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub mode: ObservationMode,
    pub text: String,
    pub step_index: usize,
    pub last_outcome: Option<StepOutcome>,
    pub view: View,
}

impl Observation {
    /// Components visible to the agent with their triplets, in document order.
    pub fn triplets(&self) -> Vec<(&str, &SemanticTriplet)> {
        fn go<'a>(n: &'a HybridNode, out: &mut Vec<(&'a str, &'a SemanticTriplet)>) {
            match n {
                HybridNode::Semantic { key, triplet } => out.push((key, triplet)),
                HybridNode::Structural { children, .. } => children.iter().for_each(|c| go(c, out)),
            }
        }
        let mut out = Vec::new();
        match &self.view {
            View::Hybrid(h) => go(&h.root, &mut out),
            View::Som(s) => {
                for e in &s.entries {
                    if let (Some(k), Some(t)) = (&e.component, &e.triplet) {
                        out.push((k.as_str(), t));
                    }
                }
            }
            View::Raw(_) => {}
        }
        out
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.triplets().iter().any(|(k, _)| *k == key)
    }

    /// Short stable digest of the observation text for traces.
    pub fn digest(&self) -> String {
        let mut h = DefaultHasher::new();
        self.text.hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

/// Snapshot of the page in the requested mode.
pub fn observe(env: &Env, mode: ObservationMode, step_index: usize, last_outcome: Option<StepOutcome>) -> Observation {
    let (text, view) = match mode {
        ObservationMode::Structural => {
            let h = build_hybrid_view(env.tree(), env.registry()).expect("every mounted key resolves");
            (serialize_hybrid(&h), View::Hybrid(h))
        }
        ObservationMode::Som => {
            let v = som_annotate(env.tree(), env.registry());
            (serialize_som(&v), View::Som(v))
        }
        ObservationMode::Raw => (serialize_raw(env.tree()), View::Raw(env.tree().clone())),
    };
    Observation {
        mode,
        text,
        step_index,
        last_outcome,
        view,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Outcome {
    Tool(ToolResult),
    ToolError(StructuredError),
    Atomic(AtomicResult),
    AtomicError(AtomicError),
    Stopped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub outcome: Outcome,
    /// The semantic path is obstructed; an atomic path may work.
    pub fallback_eligible: bool,
    /// The action may succeed with different parameters.
    pub retry_eligible: bool,
}

impl StepOutcome {
    pub fn new(outcome: Outcome) -> Self {
        let (fallback_eligible, retry_eligible) = match &outcome {
            Outcome::ToolError(e) => Env::flags(e.code),
            Outcome::AtomicError(_) => (false, true),
            Outcome::Atomic(r) => (false, r.rejected.is_some()),
            Outcome::Tool(_) | Outcome::Stopped => (false, false),
        };
        StepOutcome {
            outcome,
            fallback_eligible,
            retry_eligible,
        }
    }

    pub fn is_success(&self) -> bool {
        !self.fallback_eligible && !self.retry_eligible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Proceed,
    RetrySameGoal,
    FallbackToAtomic,
    Abort,
}

/// Maps an outcome to the next move. Hitting the same failure more than `retry_bound`
/// times in a row aborts.
pub fn reflect(outcome: &StepOutcome, history: &[TraceStep], retry_bound: usize) -> Verdict {
    if outcome.is_success() {
        return Verdict::Proceed;
    }
    if outcome.fallback_eligible {
        return Verdict::FallbackToAtomic;
    }
    let repeats = 1 + history.iter().rev().take_while(|s| s.outcome == *outcome).count();
    if repeats > retry_bound {
        Verdict::Abort
    } else {
        Verdict::RetrySameGoal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub observation_digest: String,
    pub action: ActionCommand,
    pub outcome: StepOutcome,
    pub fallback_used: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    Success,
    Failure,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub task_id: String,
    pub agent: String,
    pub seed: u64,
    pub noise: f64,
    pub steps: Vec<TraceStep>,
    pub terminal: Terminal,
    /// Executed actions; the closing stop is not counted.
    pub step_count: usize,
    /// The backend ended the episode itself.
    #[serde(default)]
    pub stopped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    /// Decisions the backend failed to produce.
    #[serde(default)]
    pub backend_errors: usize,
    pub final_state: Value,
}

impl EpisodeTrace {
    pub fn actions(&self) -> Vec<ActionCommand> {
        self.steps.iter().map(|s| s.action.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub mode: ObservationMode,
    pub budget: usize,
    pub noise: f64,
    pub seed: u64,
    pub retry_bound: usize,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            mode: ObservationMode::Structural,
            budget: DEFAULT_BUDGET,
            noise: 0.0,
            seed: 0,
            retry_bound: DEFAULT_RETRY_BOUND,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("page fixture: {0}")]
    Fixture(#[from] PageError),
    #[error("no applicable action")]
    NoActionAvailable,
    #[error("remote backend: {0}")]
    Remote(String),
    #[error("remote backend timed out: {0}")]
    Timeout(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
}

/// What the backend sees when asked for the next action.
pub struct DecideContext<'a> {
    pub observation: &'a Observation,
    pub task: &'a TaskSpec,
    pub history: &'a [TraceStep],
    /// Verdict on the previous step, if any.
    pub verdict: Option<Verdict>,
    /// The live page; planners only ever explore clones of it.
    pub env: &'a Env,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: ActionCommand,
    /// True when an atomic action replaces an unavailable or obstructed tool call.
    pub fallback: bool,
}

impl Decision {
    pub fn new(action: ActionCommand) -> Self {
        Decision { action, fallback: false }
    }

    pub fn fallback(action: ActionCommand) -> Self {
        Decision { action, fallback: true }
    }
}

/// Runs one episode on a fresh environment until stop, abort or budget.
pub fn run_episode(task: &TaskSpec, backend: &mut dyn Backend, cfg: &EpisodeConfig) -> Result<(EpisodeTrace, Env), AgentError> {
    let env = Env::new(&task.page, cfg.noise, cfg.seed)?;
    Ok(run_episode_in(env, task, backend, cfg))
}

/// Like [`run_episode`] on a caller-prepared environment.
pub fn run_episode_in(mut env: Env, task: &TaskSpec, backend: &mut dyn Backend, cfg: &EpisodeConfig) -> (EpisodeTrace, Env) {
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut last: Option<StepOutcome> = None;
    let mut verdict = None;
    let mut answer = None;
    let mut stopped = false;
    let mut backend_errors = 0;
    let mut consecutive_errors = 0;
    let terminal = loop {
        if steps.len() >= cfg.budget {
            break if check_oracle(&env, &task.oracle) {
                Terminal::Success
            } else {
                Terminal::BudgetExhausted
            };
        }
        let obs = observe(&env, cfg.mode, steps.len(), last.clone());
        let ctx = DecideContext {
            observation: &obs,
            task,
            history: &steps,
            verdict,
            env: &env,
        };
        let decision = match backend.decide(&ctx) {
            Ok(d) => {
                consecutive_errors = 0;
                d
            }
            Err(e) => {
                log::debug!("{}: {} on {}: {e}", backend.name(), task.id, steps.len());
                backend_errors += 1;
                consecutive_errors += 1;
                if consecutive_errors > cfg.retry_bound {
                    break Terminal::Failure;
                }
                continue;
            }
        };
        if let ActionCommand::Stop { answer: a } = &decision.action {
            answer = a.clone();
            stopped = true;
            break if check_oracle(&env, &task.oracle) {
                Terminal::Success
            } else {
                Terminal::Failure
            };
        }
        let outcome = env.execute(&decision.action);
        let v = reflect(&outcome, &steps, cfg.retry_bound);
        steps.push(TraceStep {
            observation_digest: obs.digest(),
            action: decision.action,
            outcome: outcome.clone(),
            fallback_used: decision.fallback,
            verdict: v,
        });
        last = Some(outcome);
        verdict = Some(v);
        if v == Verdict::Abort {
            break Terminal::Failure;
        }
    };
    let trace = EpisodeTrace {
        task_id: task.id.clone(),
        agent: backend.name().to_string(),
        seed: cfg.seed,
        noise: cfg.noise,
        step_count: steps.len(),
        steps,
        terminal,
        stopped,
        answer,
        backend_errors,
        final_state: env.fingerprint(),
    };
    (trace, env)
}

/// Re-executes a recorded action list on a fresh, noise-free environment.
pub fn replay(task: &TaskSpec, actions: &[ActionCommand]) -> Result<Env, AgentError> {
    let mut env = Env::new(&task.page, 0.0, 0)?;
    for a in actions {
        env.execute(a);
    }
    Ok(env)
}
