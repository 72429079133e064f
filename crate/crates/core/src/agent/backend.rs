//! Decision backends: a scripted oracle, the pure atomic baseline, the semantic-first
//! heuristic and a remote model.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    repair_params, ActionCommand, AgentError, DecideContext, Decision, Outcome, PlanCache, PlanStep, RemoteBackend,
    RemoteConfig, Verdict,
};
use crate::benchmark::Goal;
use crate::component_model::{AtomicEvent, EventKind, Params};
use crate::registry::validate_params;

pub trait Backend: Send {
    fn name(&self) -> &str;
    fn decide(&mut self, ctx: &DecideContext<'_>) -> Result<Decision, AgentError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackendKind {
    ScriptedOracle,
    AtomicBaseline,
    SemanticFirst,
    Remote(RemoteConfig),
}

impl BackendKind {
    /// Names accepted on the command line. `remote` needs a configuration.
    pub const NAMES: [&'static str; 4] = ["scripted-oracle", "atomic-baseline", "semantic-first", "remote"];

    pub fn name(&self) -> &'static str {
        match self {
            BackendKind::ScriptedOracle => "scripted-oracle",
            BackendKind::AtomicBaseline => "atomic-baseline",
            BackendKind::SemanticFirst => "semantic-first",
            BackendKind::Remote(_) => "remote",
        }
    }

    pub fn parse(name: &str, remote: Option<&RemoteConfig>) -> Result<BackendKind, AgentError> {
        match name {
            "scripted-oracle" => Ok(BackendKind::ScriptedOracle),
            "atomic-baseline" => Ok(BackendKind::AtomicBaseline),
            "semantic-first" => Ok(BackendKind::SemanticFirst),
            "remote" => remote
                .cloned()
                .map(BackendKind::Remote)
                .ok_or_else(|| AgentError::Remote("no endpoint configured".into())),
            other => Err(AgentError::UnknownAgent(other.to_string())),
        }
    }

    /// Agents that never issue tool calls; only these may define difficulty buckets.
    pub fn is_atomic_only(&self) -> bool {
        matches!(self, BackendKind::AtomicBaseline)
    }

    pub fn build(&self, plans: &PlanCache, retry_bound: usize) -> Box<dyn Backend> {
        match self {
            BackendKind::ScriptedOracle => Box::new(ScriptedOracle::new(plans.clone())),
            BackendKind::AtomicBaseline => Box::new(GreedyAtomicBaseline::new(plans.clone())),
            BackendKind::SemanticFirst => Box::new(SemanticFirstHeuristic::new(plans.clone(), retry_bound)),
            BackendKind::Remote(cfg) => Box::new(RemoteBackend::new(cfg.clone())),
        }
    }
}

/// Closed-loop atomic step: re-plans from the current page every time.
fn atomic_step(plans: &PlanCache, ctx: &DecideContext<'_>) -> Option<AtomicEvent> {
    plans.plan(ctx.env, ctx.task)?.first().map(|s| s.event.clone())
}

/// Follows the task's scripted plan, or the shortest atomic plan when none is given.
pub struct ScriptedOracle {
    plans: PlanCache,
    cursor: usize,
}

impl ScriptedOracle {
    pub fn new(plans: PlanCache) -> Self {
        ScriptedOracle { plans, cursor: 0 }
    }
}

impl Backend for ScriptedOracle {
    fn name(&self) -> &str {
        "scripted-oracle"
    }

    fn decide(&mut self, ctx: &DecideContext<'_>) -> Result<Decision, AgentError> {
        let action = match &ctx.task.hints {
            Some(hints) => {
                let a = hints.get(self.cursor).cloned().unwrap_or_else(ActionCommand::stop);
                self.cursor += 1;
                a
            }
            None => match atomic_step(&self.plans, ctx) {
                Some(event) => ActionCommand::Atomic { event },
                None => ActionCommand::stop(),
            },
        };
        Ok(Decision::new(action))
    }
}

/// Human-style agent restricted to atomic events. It computes one shortest plan up front
/// and executes it open loop, giving up as soon as the page does not react as expected.
pub struct GreedyAtomicBaseline {
    plans: PlanCache,
    plan: Option<Arc<Vec<PlanStep>>>,
    pos: usize,
}

impl GreedyAtomicBaseline {
    pub fn new(plans: PlanCache) -> Self {
        GreedyAtomicBaseline {
            plans,
            plan: None,
            pos: 0,
        }
    }
}

impl Backend for GreedyAtomicBaseline {
    fn name(&self) -> &str {
        "atomic-baseline"
    }

    fn decide(&mut self, ctx: &DecideContext<'_>) -> Result<Decision, AgentError> {
        if self.plan.is_none() {
            match self.plans.plan(ctx.env, ctx.task) {
                Some(p) => self.plan = Some(p),
                None => return Ok(Decision::new(ActionCommand::stop())),
            }
        }
        let plan = self.plan.as_ref().expect("set above");
        if self.pos > 0 && ctx.env.fingerprint().to_string() != plan[self.pos - 1].expect {
            return Ok(Decision::new(ActionCommand::Stop {
                answer: Some("page did not react as expected".into()),
            }));
        }
        let Some(step) = plan.get(self.pos) else {
            return Ok(Decision::new(ActionCommand::stop()));
        };
        self.pos += 1;
        Ok(Decision::new(ActionCommand::Atomic {
            event: step.event.clone(),
        }))
    }
}

/// Prefers one tool call per sub-goal; re-plans parameters after violations and falls back
/// to atomic events when no tool fits or the call path is obstructed.
pub struct SemanticFirstHeuristic {
    plans: PlanCache,
    retry_bound: usize,
    goal: usize,
    retries: usize,
    atomic: bool,
}

impl SemanticFirstHeuristic {
    pub fn new(plans: PlanCache, retry_bound: usize) -> Self {
        SemanticFirstHeuristic {
            plans,
            retry_bound,
            goal: 0,
            retries: 0,
            atomic: false,
        }
    }

    fn atomic_decision(&mut self, ctx: &DecideContext<'_>, fallback: bool) -> Result<Decision, AgentError> {
        self.atomic = true;
        if ctx.env.tree().component_keys().is_empty() && ctx.env.atomic_actions(&[], None).is_empty() {
            return Err(AgentError::NoActionAvailable);
        }
        Ok(match atomic_step(&self.plans, ctx) {
            Some(event) => Decision {
                action: ActionCommand::Atomic { event },
                fallback,
            },
            None => Decision::new(ActionCommand::stop()),
        })
    }

    /// Retry after a rejected call with corrected parameters, if a correction exists.
    fn retry(&mut self, ctx: &DecideContext<'_>) -> Option<Decision> {
        let last = ctx.history.last()?;
        let (ActionCommand::SemanticCall { key, tool, params }, Outcome::ToolError(err)) =
            (&last.action, &last.outcome.outcome)
        else {
            return None;
        };
        self.retries += 1;
        if self.retries > self.retry_bound {
            return None;
        }
        let (_, triplet) = ctx.observation.triplets().into_iter().find(|(k, _)| k == key)?;
        let fixed = repair_params(tool, params, err, triplet)?;
        Some(Decision::new(ActionCommand::call(key, tool, fixed)))
    }
}

/// Finds the first visible tool whose signature covers the goal's parameters. Tools whose
/// contract already accepts the values win, and among those, tools that enumerate them.
pub(crate) fn resolve_goal(
    obs: &super::Observation,
    key: Option<&str>,
    tool: Option<&str>,
    params: &Params,
) -> Option<ActionCommand> {
    let mut best: Option<(u8, ActionCommand)> = None;
    for (k, t) in obs.triplets() {
        if key.is_some_and(|want| want != k) {
            continue;
        }
        for sig in &t.signatures {
            if tool.is_some_and(|want| want != sig.name) || (tool.is_none() && params.is_empty()) {
                continue;
            }
            let covers = params.keys().all(|p| sig.params.iter().any(|s| &s.name == p))
                && sig.params.iter().filter(|s| s.required).all(|s| params.contains_key(&s.name));
            if !covers {
                continue;
            }
            let valid = validate_params(&t.signatures, &t.metadata, &sig.name, params).is_ok();
            let enumerated = params.keys().all(|p| {
                t.metadata.param(&sig.name, p).is_some_and(|c| {
                    c.schema.enum_values.is_some() || c.runtime.allowed_values.is_some() || c.runtime.date_format.is_some()
                })
            });
            let score = u8::from(valid) * 2 + u8::from(valid && enumerated);
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, ActionCommand::call(k, &sig.name, params.clone())));
            }
        }
    }
    best.map(|(_, a)| a)
}

impl Backend for SemanticFirstHeuristic {
    fn name(&self) -> &str {
        "semantic-first"
    }

    fn decide(&mut self, ctx: &DecideContext<'_>) -> Result<Decision, AgentError> {
        match ctx.verdict {
            Some(Verdict::FallbackToAtomic) => self.atomic = true,
            Some(Verdict::RetrySameGoal) if !self.atomic => {
                if let Some(d) = self.retry(ctx) {
                    return Ok(d);
                }
                return self.atomic_decision(ctx, true);
            }
            Some(Verdict::Proceed) if !self.atomic => {
                if let Some(last) = ctx.history.last() {
                    let done = match (&last.action, ctx.task.goals.get(self.goal)) {
                        (ActionCommand::SemanticCall { .. }, _) => true,
                        (ActionCommand::Atomic { .. }, Some(Goal::Click { click })) => ctx
                            .env
                            .events()
                            .iter()
                            .any(|e| e.kind == EventKind::Click && &e.key == click),
                        _ => false,
                    };
                    if done {
                        self.goal += 1;
                        self.retries = 0;
                    }
                }
            }
            _ => {}
        }
        if self.atomic {
            return self.atomic_decision(ctx, true);
        }
        let goals = &ctx.task.goals;
        if goals.is_empty() {
            return self.atomic_decision(ctx, false);
        }
        let Some(goal) = goals.get(self.goal) else {
            return Ok(Decision::new(ActionCommand::stop()));
        };
        match goal {
            Goal::Call { key, tool, params } => {
                match resolve_goal(ctx.observation, key.as_deref(), tool.as_deref(), params) {
                    Some(call) => Ok(Decision::new(call)),
                    None => self.atomic_decision(ctx, true),
                }
            }
            Goal::Click { click } => {
                let present = ctx.env.tree().structural_nodes().iter().any(|s| &s.id == click);
                if !present {
                    return Err(AgentError::NoActionAvailable);
                }
                Ok(Decision::new(ActionCommand::Atomic {
                    event: AtomicEvent::click(click.clone()),
                }))
            }
        }
    }
}
