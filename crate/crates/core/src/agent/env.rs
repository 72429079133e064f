//! One mounted page plus its event log and noise source.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::{ActionCommand, Outcome, StepOutcome};
use crate::component_model::{
    AtomicError, AtomicEvent, AtomicResult, AtomicVerb, Disclosure, EnvEvent, EventKind, Params, ToolResult,
};
use crate::page_tree::{build_page, FixtureNode, PageError, PageTree};
use crate::registry::{ErrorCode, Registry, StructuredError};

#[derive(Debug, Clone)]
pub struct Env {
    registry: Registry,
    tree: PageTree,
    events: Vec<EnvEvent>,
    noise: f64,
    rng: ChaCha8Rng,
}

enum Target<'a> {
    Component(&'a str),
    Element { interactive: bool },
}

impl Env {
    pub fn new(page: &FixtureNode, noise: f64, seed: u64) -> Result<Env, PageError> {
        Env::with_rng(page, noise, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(page: &FixtureNode, noise: f64, rng: ChaCha8Rng) -> Result<Env, PageError> {
        let mut registry = Registry::new();
        let tree = build_page(page, &mut registry)?;
        Ok(Env {
            registry,
            tree,
            events: Vec::new(),
            noise,
            rng,
        })
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    /// Direct registry access for fault injection in tests and tools.
    pub fn registry_mut(&mut self) -> &mut Registry {
        &mut self.registry
    }

    pub fn tree(&self) -> &PageTree {
        &self.tree
    }

    pub fn events(&self) -> &[EnvEvent] {
        &self.events
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn set_noise(&mut self, noise: f64) {
        self.noise = noise;
    }

    /// Re-reads component renderings after out-of-band registry changes.
    pub fn refresh(&mut self) {
        self.tree = self.tree.refresh(&self.registry);
    }

    /// Everything that defines the page's logical state: internal component states and the event log.
    pub fn fingerprint(&self) -> Value {
        let components: Map<String, Value> = self
            .tree
            .component_keys()
            .into_iter()
            .map(|k| {
                let s = self.registry.get(&k).map_or(Value::Null, |i| i.internal_state());
                (k, s)
            })
            .collect();
        json!({"components": components, "events": self.events})
    }

    pub fn call_tool(&mut self, key: &str, tool: &str, params: &Params) -> Result<ToolResult, StructuredError> {
        let res = self.registry.call_tool(key, tool, params)?;
        self.events.extend(res.events.iter().cloned());
        self.refresh();
        Ok(res)
    }

    fn target<'a>(&self, id: &'a str) -> Option<Target<'a>> {
        let head = id.split('/').next().unwrap_or(id);
        if self.registry.contains(head) {
            return Some(Target::Component(head));
        }
        self.tree
            .structural_nodes()
            .into_iter()
            .find(|s| s.id == id)
            .map(|s| Target::Element {
                interactive: s.interactive,
            })
    }

    /// Routes an atomic event to the component owning the target, or to a plain element.
    pub fn apply_atomic(&mut self, event: &AtomicEvent) -> Result<AtomicResult, AtomicError> {
        let res = match self.target(&event.target) {
            None => return Err(AtomicError::NoSuchTarget(event.target.clone())),
            Some(Target::Component(k)) => self.registry.apply_atomic(k, event, self.noise, &mut self.rng)?,
            Some(Target::Element { interactive }) => {
                let mut res = AtomicResult {
                    event: event.clone(),
                    effective: true,
                    changed: false,
                    disclosure: Disclosure::None,
                    rejected: None,
                    events: Vec::new(),
                };
                if self.noise > 0.0 && self.rng.random::<f64>() < self.noise {
                    res.effective = false;
                    return Ok(res);
                }
                match event.verb {
                    AtomicVerb::Click if interactive => {
                        res.changed = true;
                        res.events.push(EnvEvent::new(&event.target, EventKind::Click, None));
                    }
                    AtomicVerb::Type { .. } => res.rejected = Some("not editable".into()),
                    _ => {}
                }
                res
            }
        };
        self.events.extend(res.events.iter().cloned());
        self.refresh();
        Ok(res)
    }

    pub fn execute(&mut self, action: &ActionCommand) -> StepOutcome {
        match action {
            ActionCommand::SemanticCall { key, tool, params } => match self.call_tool(key, tool, params) {
                Ok(r) => StepOutcome::new(Outcome::Tool(r)),
                Err(e) => StepOutcome::new(Outcome::ToolError(e)),
            },
            ActionCommand::Atomic { event } => match self.apply_atomic(event) {
                Ok(r) => StepOutcome::new(Outcome::Atomic(r)),
                Err(e) => StepOutcome::new(Outcome::AtomicError(e)),
            },
            ActionCommand::Stop { .. } => StepOutcome::new(Outcome::Stopped),
        }
    }

    /// Atomic events worth trying on the current page: clicks on enabled nodes, scrolls on
    /// scrollable ones and each of `payloads` typed into editable text boxes. `keys` limits
    /// the components considered; plain elements are included when flagged interactive.
    pub fn atomic_actions(&self, payloads: &[String], keys: Option<&BTreeSet<String>>) -> Vec<AtomicEvent> {
        let mut out = Vec::new();
        for s in self.tree.structural_nodes() {
            if s.interactive && keys.is_none_or(|k| k.contains(&s.id)) {
                out.push(AtomicEvent::click(s.id.clone()));
            }
        }
        for k in self.tree.component_keys() {
            if keys.is_some_and(|ks| !ks.contains(&k)) {
                continue;
            }
            if let Some(root) = self.tree.rendered(&k) {
                super::planner::rendered_actions(root, payloads, &mut out);
            }
        }
        out
    }

    /// Maps a registry error code to the fallback/retry flags an agent reacts to.
    pub(crate) fn flags(code: ErrorCode) -> (bool, bool) {
        match code {
            ErrorCode::UnknownTool | ErrorCode::InvalidKey | ErrorCode::ComponentDisabled => (true, false),
            ErrorCode::ParameterViolation | ErrorCode::HandlerFailure => (false, true),
        }
    }
}
