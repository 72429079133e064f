//! Breadth-first search for the shortest atomic event sequence that satisfies a task oracle.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Env;
use crate::benchmark::{matched_leaves, oracle_holds, Assertion, EventAssertion, TaskSpec};
use crate::component_model::{
    AtomicEvent, AtomicVerb, ComponentInstance, EnvEvent, EventKind, RenderedNode, Role, ScrollDirection,
};

/// Default cap on explored states before a search gives up.
pub const DEFAULT_STATE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    pub event: AtomicEvent,
    /// Environment fingerprint expected right after the event.
    pub expect: String,
}

/// Candidate events on one rendered component: clicks on enabled nodes, scrolls on
/// scrollable ones and each payload typed into editable text boxes.
pub(crate) fn rendered_actions(root: &RenderedNode, payloads: &[String], out: &mut Vec<AtomicEvent>) {
    for n in root.walk() {
        if n.disabled || n.id == root.id {
            continue;
        }
        if n.scrollable {
            out.push(AtomicEvent::scroll(n.id.clone(), ScrollDirection::Down));
        }
        out.push(AtomicEvent::click(n.id.clone()));
        if n.role == Role::Textbox && !n.readonly {
            out.extend(payloads.iter().map(|p| AtomicEvent::type_text(n.id.clone(), p.clone())));
        }
    }
}

/// Search state restricted to the components the oracle reads. Widgets never affect each
/// other, so events elsewhere cannot shorten a plan.
#[derive(Clone)]
struct Node {
    comps: Vec<ComponentInstance>,
    /// Seen events the oracle asks about, sorted and deduplicated.
    events: Vec<EnvEvent>,
}

impl Node {
    fn key(&self) -> String {
        let states: Vec<Value> = self.comps.iter().map(|c| c.internal_state()).collect();
        json!([states, self.events]).to_string()
    }

    fn statuses(&self) -> Vec<(String, Value)> {
        self.comps.iter().map(|c| (c.key().to_string(), c.semantic_state().status)).collect()
    }

    fn record(&mut self, events: impl IntoIterator<Item = EnvEvent>, wanted: &[&EventAssertion]) {
        for e in events.into_iter().filter(|e| wanted.iter().any(|w| w.matches(e))) {
            if let Err(i) = self.events.binary_search_by(|x| cmp_event(x, &e)) {
                self.events.insert(i, e);
            }
        }
    }
}

fn lookup(statuses: &[(String, Value)], key: &str) -> Option<Value> {
    statuses.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

fn cmp_event(a: &EnvEvent, b: &EnvEvent) -> std::cmp::Ordering {
    (&a.key, a.kind, &a.value).cmp(&(&b.key, b.kind, &b.value))
}

/// Shortest noise-free atomic plan from `env` to a state where the task oracle holds.
/// Typing is only explored when it moves some expected value into place. Returns `None`
/// when no plan exists within `limit` explored states.
pub fn shortest_atomic_plan(env: &Env, task: &TaskSpec, limit: usize) -> Option<Vec<PlanStep>> {
    let keys = task.oracle_keys();
    let wanted: Vec<&EventAssertion> = task
        .oracle
        .iter()
        .filter_map(|a| match a {
            Assertion::Event { event } => Some(event),
            Assertion::State { .. } => None,
        })
        .collect();
    let mut start = Node {
        comps: keys.iter().filter_map(|k| env.registry().get(k).cloned()).collect(),
        events: Vec::new(),
    };
    start.record(env.events().iter().cloned(), &wanted);
    let elements: Vec<String> = env
        .tree()
        .structural_nodes()
        .into_iter()
        .filter(|s| s.interactive && keys.contains(&s.id))
        .map(|s| s.id.clone())
        .collect();
    let alphabet = task.typing_alphabet();
    let holds = |n: &Node, st: &[(String, Value)]| oracle_holds(&task.oracle, |k| lookup(st, k), &n.events);
    let matched = |st: &[(String, Value)]| matched_leaves(&task.oracle, |k| lookup(st, k));

    let found = if holds(&start, &start.statuses()) {
        Some(Vec::new())
    } else {
        // (parent index, event)
        let mut nodes: Vec<(usize, AtomicEvent)> = Vec::new();
        let mut seen = HashSet::from([start.key()]);
        let mut queue = VecDeque::from([(usize::MAX, start)]);
        let mut result = None;
        'search: while let Some((idx, cur)) = queue.pop_front() {
            let mut moves: Vec<(Option<usize>, AtomicEvent)> =
                elements.iter().map(|e| (None, AtomicEvent::click(e.clone()))).collect();
            for (ci, c) in cur.comps.iter().enumerate() {
                let mut evs = Vec::new();
                rendered_actions(&c.render(), &alphabet, &mut evs);
                moves.extend(evs.into_iter().map(|e| (Some(ci), e)));
            }
            let mut base = None;
            for (ci, ev) in moves {
                let mut next = cur.clone();
                match ci {
                    None => next.record([EnvEvent::new(&ev.target, EventKind::Click, None)], &wanted),
                    Some(ci) => {
                        let res = next.comps[ci].apply_rendered(&ev);
                        if res.rejected.is_some() || !res.changed && res.events.is_empty() {
                            continue;
                        }
                        next.record(res.events, &wanted);
                    }
                }
                if !seen.insert(next.key()) {
                    continue;
                }
                let st = next.statuses();
                if matches!(ev.verb, AtomicVerb::Type { .. }) {
                    let before = *base.get_or_insert_with(|| matched(&cur.statuses()));
                    if matched(&st) <= before {
                        continue;
                    }
                }
                nodes.push((idx, ev));
                let me = nodes.len() - 1;
                if holds(&next, &st) {
                    log::debug!("plan for {} found after {} states", task.id, seen.len());
                    let mut plan = Vec::new();
                    let mut i = me;
                    while i != usize::MAX {
                        plan.push(nodes[i].1.clone());
                        i = nodes[i].0;
                    }
                    plan.reverse();
                    result = Some(plan);
                    break 'search;
                }
                if seen.len() >= limit {
                    break 'search;
                }
                queue.push_back((me, next));
            }
        }
        result
    }?;

    // Expected fingerprints come from replaying on a noise-free copy of the whole page.
    let mut sim = env.clone();
    sim.set_noise(0.0);
    let plan = found
        .into_iter()
        .map(|event| {
            let _ = sim.apply_atomic(&event);
            PlanStep {
                event,
                expect: sim.fingerprint().to_string(),
            }
        })
        .collect();
    Some(plan)
}

type Slot = Arc<OnceLock<Option<Arc<Vec<PlanStep>>>>>;

/// Shared memo of plans keyed by task and starting state. Concurrent requests for the same
/// key wait for a single search.
#[derive(Debug, Clone, Default)]
pub struct PlanCache {
    slots: Arc<Mutex<HashMap<(String, String), Slot>>>,
    limit: Option<usize>,
}

impl PlanCache {
    pub fn with_limit(limit: usize) -> Self {
        PlanCache {
            slots: Arc::default(),
            limit: Some(limit),
        }
    }

    pub fn plan(&self, env: &Env, task: &TaskSpec) -> Option<Arc<Vec<PlanStep>>> {
        let key = (task.id.clone(), env.fingerprint().to_string());
        let slot = self.slots.lock().expect("plan cache poisoned").entry(key).or_default().clone();
        slot.get_or_init(|| {
            shortest_atomic_plan(env, task, self.limit.unwrap_or(DEFAULT_STATE_LIMIT)).map(Arc::new)
        })
        .clone()
    }
}
