//! Task fixtures and the functional-correctness oracle.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agent::{ActionCommand, Env};
use crate::component_model::{ComponentKey, EnvEvent, EventKind, Params};
use crate::page_tree::{build_page, parse_fixture, FixtureNode, PageError};
use crate::registry::{values_equal, Registry};

pub const SUITE_VERSION: u32 = 1;

/// Expected environment event. `value` is compared only when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventAssertion {
    pub key: String,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl EventAssertion {
    pub fn matches(&self, e: &EnvEvent) -> bool {
        e.key == self.key && e.kind == self.kind && (self.value.is_none() || self.value == e.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Assertion {
    /// `path` is a JSON pointer into the component's semantic status.
    State { key: ComponentKey, path: String, equals: Value },
    Event { event: EventAssertion },
}

/// One sub-goal of a task, as a planner would extract it from the instruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Goal {
    /// Activate a plain page element.
    Click { click: String },
    /// Reach a component state; key and tool may be left for the agent to resolve.
    Call {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        key: Option<ComponentKey>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tool: Option<String>,
        #[serde(default)]
        params: Params,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    pub instruction: String,
    pub oracle: Vec<Assertion>,
    #[serde(default)]
    pub goals: Vec<Goal>,
    /// Scripted plan for the oracle backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hints: Option<Vec<ActionCommand>>,
    /// Extra text an atomic agent may type besides the values named in the oracle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket_baseline_steps: Option<usize>,
    #[serde(skip)]
    pub page: Arc<FixtureNode>,
    #[serde(skip)]
    pub source: PathBuf,
}

impl TaskSpec {
    pub fn new(id: &str, page: FixtureNode, oracle: Vec<Assertion>) -> Self {
        TaskSpec {
            id: id.into(),
            instruction: String::new(),
            oracle,
            goals: Vec::new(),
            hints: None,
            inputs: Vec::new(),
            bucket_baseline_steps: None,
            page: Arc::new(page),
            source: PathBuf::new(),
        }
    }

    /// Texts an atomic agent may type: `inputs` plus every scalar the oracle and goals mention.
    pub fn typing_alphabet(&self) -> Vec<String> {
        fn scalars(v: &Value, out: &mut BTreeSet<String>) {
            match v {
                Value::String(s) => {
                    out.insert(s.clone());
                }
                Value::Number(n) => {
                    out.insert(n.to_string());
                }
                Value::Array(a) => a.iter().for_each(|x| scalars(x, out)),
                Value::Object(m) => m.values().for_each(|x| scalars(x, out)),
                _ => {}
            }
        }
        let mut out: BTreeSet<String> = self.inputs.iter().cloned().collect();
        for a in &self.oracle {
            if let Assertion::State { equals, .. } = a {
                scalars(equals, &mut out);
            }
        }
        for g in &self.goals {
            if let Goal::Call { params, .. } = g {
                params.values().for_each(|v| scalars(v, &mut out));
            }
        }
        out.into_iter().collect()
    }

    /// Components the oracle looks at.
    pub fn oracle_keys(&self) -> BTreeSet<String> {
        self.oracle
            .iter()
            .map(|a| match a {
                Assertion::State { key, .. } => key.clone(),
                Assertion::Event { event } => event.key.clone(),
            })
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", file.display())]
    Fixture {
        file: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default = "default_version")]
    version: u32,
    page: FixtureNode,
    tasks: Vec<TaskSpec>,
}

fn default_version() -> u32 {
    SUITE_VERSION
}

/// Loads one suite file, or every `*.json` file of a directory in name order.
pub fn load_suite(path: &Path) -> Result<Vec<TaskSpec>, SuiteError> {
    let io = |source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    };
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            log::warn!("no suite files in {}", path.display());
        }
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut tasks: Vec<TaskSpec> = Vec::new();
    let mut ids = BTreeSet::new();
    for f in files {
        let text = fs::read_to_string(&f).map_err(|source| SuiteError::Io {
            path: f.clone(),
            source,
        })?;
        for t in parse_suite(&text, &f)? {
            if !ids.insert(t.id.clone()) {
                return Err(fixture_error(&f, &text, &t.id, format!("task id `{}` is used twice", t.id)));
            }
            tasks.push(t);
        }
    }
    Ok(tasks)
}

fn fixture_error(file: &Path, text: &str, anchor: &str, message: String) -> SuiteError {
    let needle = serde_json::to_string(anchor).unwrap_or_default();
    let (line, column) = text
        .lines()
        .enumerate()
        .find_map(|(i, l)| l.find(&needle).map(|c| (i + 1, c + 1)))
        .unwrap_or((0, 0));
    SuiteError::Fixture {
        file: file.to_path_buf(),
        line,
        column,
        message,
    }
}

/// Parses and validates suite text; `file` is only used for diagnostics.
pub fn parse_suite(text: &str, file: &Path) -> Result<Vec<TaskSpec>, SuiteError> {
    parse_suite_file(text, file).map(|(_, tasks)| tasks)
}

/// Reads the page of a suite file, or a bare page fixture.
pub fn load_page(path: &Path) -> Result<Arc<FixtureNode>, SuiteError> {
    let text = fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let is_suite = serde_json::from_str::<Value>(&text)
        .ok()
        .is_some_and(|v| v.get("page").is_some() && v.get("tasks").is_some());
    if is_suite {
        return parse_suite_file(&text, path).map(|(page, _)| page);
    }
    let fixture_err = |line, message| SuiteError::Fixture {
        file: path.to_path_buf(),
        line,
        column: 0,
        message,
    };
    let page = parse_fixture(&text).map_err(|e| match e {
        PageError::FixtureParse { line, column, message } => SuiteError::Fixture {
            file: path.to_path_buf(),
            line,
            column,
            message,
        },
        other => fixture_err(0, other.to_string()),
    })?;
    build_page(&page, &mut Registry::new()).map_err(|e| fixture_err(0, e.to_string()))?;
    Ok(Arc::new(page))
}

fn parse_suite_file(text: &str, file: &Path) -> Result<(Arc<FixtureNode>, Vec<TaskSpec>), SuiteError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let suite: SuiteFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        SuiteError::Fixture {
            file: file.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            message: format!("at {}: {inner}", e.path()),
        }
    })?;
    if suite.version != SUITE_VERSION {
        return Err(SuiteError::Fixture {
            file: file.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("unsupported suite version {}", suite.version),
        });
    }
    let mut scratch = Registry::new();
    let page = build_page(&suite.page, &mut scratch)
        .map_err(|e| fixture_error(file, text, "page", e.to_string()))?;
    let components: BTreeSet<String> = page.component_keys().into_iter().collect();
    let elements: BTreeSet<String> = page.structural_nodes().iter().map(|s| s.id.clone()).collect();
    let page_fixture = Arc::new(suite.page);
    suite
        .tasks
        .into_iter()
        .map(|mut t| {
            let fail = |msg: String| fixture_error(file, text, &t.id, format!("task `{}`: {msg}", t.id));
            if t.oracle.is_empty() {
                return Err(fail("oracle is empty".into()));
            }
            for a in &t.oracle {
                match a {
                    Assertion::State { key, path, .. } => {
                        if !components.contains(key) {
                            return Err(fail(format!("oracle references undeclared key `{key}`")));
                        }
                        if !(path.is_empty() || path.starts_with('/')) {
                            return Err(fail(format!("`{path}` is not a JSON pointer")));
                        }
                    }
                    Assertion::Event { event } => {
                        let known = components.contains(&event.key)
                            || (event.kind == EventKind::Click && elements.contains(&event.key));
                        if !known {
                            return Err(fail(format!("oracle references undeclared key `{}`", event.key)));
                        }
                    }
                }
            }
            for g in &t.goals {
                match g {
                    Goal::Call { key: Some(k), .. } if !components.contains(k) => {
                        return Err(fail(format!("goal references undeclared key `{k}`")))
                    }
                    Goal::Click { click } if !elements.contains(click) => {
                        return Err(fail(format!("goal references undeclared element `{click}`")))
                    }
                    _ => {}
                }
            }
            t.page = page_fixture.clone();
            t.source = file.to_path_buf();
            Ok(t)
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|tasks| (page_fixture, tasks))
}

/// Conjunction of all assertions; anything unresolvable counts as false.
pub fn check_oracle(env: &Env, oracle: &[Assertion]) -> bool {
    oracle_holds(oracle, |k| env.registry().get_status(k).ok().map(|t| t.state.status), env.events())
}

pub(crate) fn oracle_holds(oracle: &[Assertion], status: impl Fn(&str) -> Option<Value>, events: &[EnvEvent]) -> bool {
    oracle.iter().all(|a| match a {
        Assertion::State { key, path, equals } => status(key)
            .and_then(|s| s.pointer(path).cloned())
            .is_some_and(|v| values_equal(&v, equals)),
        Assertion::Event { event } => events.iter().any(|e| event.matches(e)),
    })
}

/// How many expected scalars of the state assertions already hold. Used to tell useful
/// typing apart from typing that cannot bring the page closer to the goal.
pub(crate) fn matched_leaves(oracle: &[Assertion], status: impl Fn(&str) -> Option<Value>) -> usize {
    fn count(expected: &Value, actual: Option<&Value>) -> usize {
        match expected {
            Value::Object(m) => m.iter().map(|(k, v)| count(v, actual.and_then(|a| a.get(k)))).sum(),
            Value::Array(xs) => xs.iter().enumerate().map(|(i, v)| count(v, actual.and_then(|a| a.get(i)))).sum(),
            leaf => usize::from(actual.is_some_and(|a| values_equal(a, leaf))),
        }
    }
    oracle
        .iter()
        .map(|a| match a {
            Assertion::State { key, path, equals } => {
                let s = status(key);
                count(equals, s.as_ref().and_then(|s| s.pointer(path)))
            }
            Assertion::Event { .. } => 0,
        })
        .sum()
}
