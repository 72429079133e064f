//! Simulated UI components exposing the semantic triplet (state view, tools, metadata)
//! alongside a human-style atomic interaction surface with progressive disclosure.

mod atomic;
pub mod datefmt;
mod kind;
mod metadata;
pub(crate) mod pattern;
mod render;
mod whitelist;
pub mod widgets;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use atomic::{
    AtomicEffect, AtomicError, AtomicEvent, AtomicResult, AtomicVerb, Disclosure, EnvEvent, EventKind,
    ScrollDirection,
};
pub use kind::{Category, ComponentKind, Widget};
pub use metadata::{
    InteractionMetadata, Limit, ParamContract, ParamSchema, ParamSpec, ParamType, RuntimeConstraints,
    ToolSignature,
};
pub use render::{RenderedNode, Role};
pub use whitelist::whitelist;

pub type ComponentKey = String;
pub type Params = Map<String, Value>;

/// Behaviour shared by every simulated widget.
pub trait WidgetModel: fmt::Debug + Send + Sync {
    fn widget(&self) -> Widget;

    /// Everything the props listener can see: props, state and derived business fields.
    /// The whitelist decides what reaches the semantic view.
    fn listener_snapshot(&self) -> Map<String, Value>;

    fn state(&self) -> Value;

    /// Replaces internal state wholesale (direct-mutation dispatch fallback).
    fn restore(&mut self, state: Value) -> Result<(), String>;

    fn signatures(&self) -> Vec<ToolSignature>;

    fn metadata(&self) -> InteractionMetadata;

    /// Tools backed by a native event handler.
    fn handled_tools(&self) -> &'static [&'static str];

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String>;

    /// Root of the rendered subtree; only disclosed content appears.
    fn render(&self, key: &str) -> RenderedNode;

    /// Handles an event on an existing, enabled node. `local` is the node id without the `key/` prefix.
    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect;

    fn clone_box(&self) -> Box<dyn WidgetModel>;
}

impl Clone for Box<dyn WidgetModel> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// A fixture entry describing one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub key: ComponentKey,
    pub widget: String,
    #[serde(default = "empty_object")]
    pub props: Value,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub disabled: bool,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComponentError {
    #[error("unknown widget `{0}`")]
    UnknownWidget(String),
    #[error("malformed props: field `{field}`: {reason}")]
    MalformedProps { field: String, reason: String },
}

impl ComponentError {
    pub fn malformed(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ComponentError::MalformedProps {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticStateView {
    pub name: String,
    pub kind: ComponentKind,
    pub status: Value,
}

impl SemanticStateView {
    /// The finite set of values a user could commit, if the widget has one.
    pub fn candidate_values(&self) -> Option<BTreeSet<String>> {
        widgets::candidates(self.kind.widget, &self.status)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldChange {
    pub field: String,
    pub old: Value,
    pub new: Value,
}

/// Which whitelisted fields a tool call changed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EffectSummary {
    pub changes: Vec<FieldChange>,
}

impl EffectSummary {
    pub fn between(before: &Value, after: &Value) -> Self {
        let empty = Map::new();
        let b = before.as_object().unwrap_or(&empty);
        let a = after.as_object().unwrap_or(&empty);
        let fields: BTreeSet<&String> = b.keys().chain(a.keys()).collect();
        let changes = fields
            .into_iter()
            .filter_map(|f| {
                let old = b.get(f).cloned().unwrap_or(Value::Null);
                let new = a.get(f).cloned().unwrap_or(Value::Null);
                (old != new).then(|| FieldChange {
                    field: f.clone(),
                    old,
                    new,
                })
            })
            .collect();
        EffectSummary { changes }
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub key: ComponentKey,
    pub tool: String,
    pub state: SemanticStateView,
    pub effect: EffectSummary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EnvEvent>,
    /// True when no native handler existed and state was mutated directly.
    #[serde(default)]
    pub direct_mutation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DispatchError {
    #[error("unknown tool `{0}`")]
    UnknownTool(String),
    #[error("component is disabled")]
    Disabled,
    #[error("handler failed: {0}")]
    HandlerFailure(String),
}

pub type CustomHandler = Arc<dyn Fn(&mut Map<String, Value>, &Params) -> Result<(), String> + Send + Sync>;

/// Routine bound to a tool name.
#[derive(Clone)]
pub enum Handler {
    /// The widget's own event handler.
    Native,
    /// Operates on the JSON form of internal state.
    Custom(CustomHandler),
}

impl fmt::Debug for Handler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Handler::Native => f.write_str("Native"),
            Handler::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComponentInstance {
    key: ComponentKey,
    kind: ComponentKind,
    model: Box<dyn WidgetModel>,
    disabled: bool,
    handlers: BTreeMap<String, Handler>,
}

/// Builds a component in its initial collapsed, unselected state.
pub fn instantiate(spec: &ComponentSpec) -> Result<ComponentInstance, ComponentError> {
    let widget: Widget = spec
        .widget
        .parse()
        .map_err(|_| ComponentError::UnknownWidget(spec.widget.clone()))?;
    if spec.key.is_empty() || spec.key.contains('/') || spec.key.contains(char::is_whitespace) {
        return Err(ComponentError::malformed("key", "must be non-empty without `/` or whitespace"));
    }
    if !spec.props.is_object() {
        return Err(ComponentError::malformed("props", "expected an object"));
    }
    let model = widgets::build(widget, &spec.props)?;
    let handlers = model
        .handled_tools()
        .iter()
        .map(|t| (t.to_string(), Handler::Native))
        .collect();
    Ok(ComponentInstance {
        key: spec.key.clone(),
        kind: widget.into(),
        model,
        disabled: spec.disabled,
        handlers,
    })
}

impl ComponentInstance {
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn kind(&self) -> ComponentKind {
        self.kind
    }

    pub fn is_disabled(&self) -> bool {
        self.disabled
    }

    pub fn set_disabled(&mut self, disabled: bool) {
        self.disabled = disabled;
    }

    pub fn handlers(&self) -> &BTreeMap<String, Handler> {
        &self.handlers
    }

    pub fn set_handler(&mut self, tool: &str, handler: Handler) {
        self.handlers.insert(tool.to_string(), handler);
    }

    pub fn remove_handler(&mut self, tool: &str) {
        self.handlers.remove(tool);
    }

    pub fn internal_state(&self) -> Value {
        self.model.state()
    }

    pub fn semantic_state(&self) -> SemanticStateView {
        let snapshot = self.model.listener_snapshot();
        let allowed = whitelist(self.kind.widget);
        let status: Map<String, Value> = snapshot
            .into_iter()
            .filter(|(k, _)| allowed.contains(&k.as_str()))
            .collect();
        SemanticStateView {
            name: self.key.clone(),
            kind: self.kind,
            status: Value::Object(status),
        }
    }

    pub fn tool_signatures(&self) -> Vec<ToolSignature> {
        self.model.signatures()
    }

    pub fn metadata(&self) -> InteractionMetadata {
        self.model.metadata()
    }

    pub fn render(&self) -> RenderedNode {
        let mut root = self.model.render(&self.key);
        if self.disabled {
            mark_disabled(&mut root);
        }
        root
    }

    /// Runs a tool whose params were already validated. Handler first, direct state
    /// mutation otherwise; all-or-nothing either way.
    pub fn dispatch_tool(&mut self, tool: &str, params: &Params) -> Result<ToolResult, DispatchError> {
        if self.disabled {
            return Err(DispatchError::Disabled);
        }
        if !self.model.signatures().iter().any(|s| s.name == tool) {
            return Err(DispatchError::UnknownTool(tool.to_string()));
        }
        let before = self.semantic_state();
        let mut scratch = self.model.clone_box();
        let mut direct_mutation = false;
        let events = match self.handlers.get(tool) {
            Some(Handler::Native) => scratch
                .handle(&self.key, tool, params)
                .map_err(DispatchError::HandlerFailure)?,
            Some(Handler::Custom(f)) => {
                let mut state = into_object(scratch.state());
                f(&mut state, params).map_err(DispatchError::HandlerFailure)?;
                scratch
                    .restore(Value::Object(state))
                    .map_err(DispatchError::HandlerFailure)?;
                Vec::new()
            }
            None => {
                direct_mutation = true;
                let mut state = into_object(scratch.state());
                for (k, v) in params {
                    if !state.contains_key(k) {
                        return Err(DispatchError::HandlerFailure(format!("no state field `{k}`")));
                    }
                    state.insert(k.clone(), v.clone());
                }
                scratch
                    .restore(Value::Object(state))
                    .map_err(DispatchError::HandlerFailure)?;
                Vec::new()
            }
        };
        self.model = scratch;
        let after = self.semantic_state();
        Ok(ToolResult {
            key: self.key.clone(),
            tool: tool.to_string(),
            effect: EffectSummary::between(&before.status, &after.status),
            state: after,
            events,
            direct_mutation,
        })
    }

    /// Applies a human-style event. With probability `noise` the event is swallowed.
    pub fn apply_atomic(
        &mut self,
        event: &AtomicEvent,
        noise: f64,
        rng: &mut dyn RngCore,
    ) -> Result<AtomicResult, AtomicError> {
        let before = self.render();
        let node = before
            .find(&event.target)
            .ok_or_else(|| AtomicError::NoSuchTarget(event.target.clone()))?;
        if node.disabled {
            return Err(AtomicError::TargetDisabled(event.target.clone()));
        }
        if noise > 0.0 && rng.random::<f64>() < noise {
            return Ok(AtomicResult {
                event: event.clone(),
                effective: false,
                changed: false,
                disclosure: Disclosure::None,
                rejected: None,
                events: Vec::new(),
            });
        }
        Ok(self.apply_rendered(event))
    }

    /// Applies an event whose target is known to be rendered and enabled, without noise.
    pub(crate) fn apply_rendered(&mut self, event: &AtomicEvent) -> AtomicResult {
        let local = event
            .target
            .strip_prefix(&self.key)
            .and_then(|r| r.strip_prefix('/'))
            .unwrap_or("");
        let state_before = self.model.state();
        let effect = self.model.apply(&self.key, local, &event.verb);
        if effect.rejected.is_some() {
            // a rejected event must leave state untouched
            self.model
                .restore(state_before.clone())
                .expect("restoring own state");
        }
        let changed = self.model.state() != state_before;
        AtomicResult {
            event: event.clone(),
            effective: true,
            changed,
            disclosure: if changed { effect.disclosure } else { Disclosure::None },
            rejected: effect.rejected,
            events: effect.events,
        }
    }
}

fn into_object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn mark_disabled(node: &mut RenderedNode) {
    node.disabled = true;
    node.children.iter_mut().for_each(mark_disabled);
}

#[cfg(test)]
mod tests;
