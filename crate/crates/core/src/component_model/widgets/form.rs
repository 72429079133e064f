//! Composite form: text, number and select fields plus a submit button.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{
    cell_text, parse_props, plain_id, snapshot, string_set, strings, to_value,
    OptionItem,
};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, Limit, ParamContract,
    ParamType, Params, RenderedNode, Role, ScrollDirection, ToolSignature, Widget, WidgetModel,
};

fn default_list_height() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FieldKind {
    Text,
    Number,
    Select,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Field {
    name: String,
    #[serde(default)]
    label: Option<String>,
    kind: FieldKind,
    #[serde(default)]
    required: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    options: Vec<OptionItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<String>,
}

impl Field {
    fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }

    fn enabled_options(&self) -> impl Iterator<Item = &OptionItem> {
        self.options.iter().filter(|o| !o.disabled)
    }

    /// Checks a value against this field's own constraints.
    fn check(&self, v: &Value) -> Result<(), String> {
        match self.kind {
            FieldKind::Text => {
                let s = v.as_str().ok_or_else(|| format!("{} expects text", self.name))?;
                if let Some(p) = &self.pattern {
                    if !crate::component_model::pattern::matches(p, s).map_err(|e| e.to_string())? {
                        return Err(format!("{} does not match {p}", self.name));
                    }
                }
            }
            FieldKind::Number => {
                let n = v.as_f64().ok_or_else(|| format!("{} expects a number", self.name))?;
                if self.min.is_some_and(|lo| n < lo) || self.max.is_some_and(|hi| n > hi) {
                    return Err(format!("{} is out of range", self.name));
                }
            }
            FieldKind::Select => {
                let s = v.as_str().ok_or_else(|| format!("{} expects an option", self.name))?;
                if !self.enabled_options().any(|o| o.value == s) {
                    return Err(format!("{} has no option `{s}`", self.name));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FormProps {
    #[serde(default)]
    label: Option<String>,
    fields: Vec<Field>,
    #[serde(default = "default_list_height")]
    list_height: usize,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FormState {
    values: BTreeMap<String, Value>,
    submitted: bool,
    /// Select field whose option list is open.
    open: Option<String>,
    loaded: usize,
    errors: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub(super) struct FormModel {
    props: FormProps,
    state: FormState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: FormProps = parse_props(props)?;
    if props.fields.is_empty() {
        return Err(ComponentError::malformed("fields", "must not be empty"));
    }
    if props.list_height == 0 {
        return Err(ComponentError::malformed("list_height", "must be positive"));
    }
    let mut names = BTreeSet::new();
    for f in &props.fields {
        if !plain_id(&f.name) || !names.insert(f.name.as_str()) {
            return Err(ComponentError::malformed("fields", format!("bad or duplicate name `{}`", f.name)));
        }
        if f.kind == FieldKind::Select && f.enabled_options().next().is_none() {
            return Err(ComponentError::malformed("fields", format!("`{}` has no options", f.name)));
        }
        if let Some(p) = &f.pattern {
            Regex::new(p).map_err(|e| ComponentError::malformed("fields", e.to_string()))?;
        }
    }
    let state = FormState {
        values: BTreeMap::new(),
        submitted: false,
        open: None,
        loaded: props.list_height,
        errors: BTreeMap::new(),
    };
    Ok(Box::new(FormModel { props, state }))
}

impl FormModel {
    fn field(&self, name: &str) -> Option<&Field> {
        self.props.fields.iter().find(|f| f.name == name)
    }

    fn problems(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for f in &self.props.fields {
            let filled = self
                .state
                .values
                .get(&f.name)
                .filter(|v| !v.is_null() && v.as_str() != Some(""));
            match filled {
                None if f.required => {
                    out.insert(f.name.clone(), "required".to_string());
                }
                None => {}
                Some(v) => {
                    if let Err(e) = f.check(v) {
                        out.insert(f.name.clone(), e);
                    }
                }
            }
        }
        out
    }

    fn set(&mut self, name: &str, v: Value) {
        self.state.values.insert(name.to_string(), v);
        self.state.errors.remove(name);
        self.state.submitted = false;
    }

    fn close(&mut self) {
        self.state.open = None;
        self.state.loaded = self.props.list_height;
    }

    fn submit_event(&self, key: &str) -> EnvEvent {
        let values = serde_json::to_string(&self.state.values).expect("values serialize");
        EnvEvent::new(key, EventKind::Submit, Some(values))
    }

    /// Ids of the nodes that come and go with the open list and the status line.
    /// Rendering the whole form just to diff these is the hot path of plan search.
    fn disclosed_ids(&self) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        if let Some(f) = self.state.open.as_deref().and_then(|n| self.field(n)) {
            ids.insert(format!("list/{}", f.name));
            ids.extend((0..f.options.len().min(self.state.loaded)).map(|i| format!("fopt/{}/{i}", f.name)));
        }
        if self.state.submitted || !self.state.errors.is_empty() {
            ids.insert("status".to_string());
        }
        ids
    }

    fn render_field(&self, key: &str, f: &Field) -> RenderedNode {
        let value = self.state.values.get(&f.name).map(cell_text).unwrap_or_default();
        let id = format!("{key}/field/{}", f.name);
        let group = RenderedNode::new(format!("{key}/group/{}", f.name), Role::Group, f.label());
        if f.kind != FieldKind::Select {
            return group.child(RenderedNode::new(id, Role::Textbox, f.label()).name(f.name.clone()).value(value));
        }
        let open = self.state.open.as_deref() == Some(f.name.as_str());
        let current = self.state.values.get(&f.name).and_then(Value::as_str);
        let shown = f
            .options
            .iter()
            .find(|o| Some(o.value.as_str()) == current)
            .map(|o| o.label().to_string())
            .unwrap_or_else(|| value.clone());
        let mut group = group.child(
            RenderedNode::new(id, Role::Combobox, shown)
                .name(f.name.clone())
                .value(value)
                .expanded(open),
        );
        if open {
            let items = f.options.iter().take(self.state.loaded).enumerate().map(|(i, o)| {
                let n = RenderedNode::new(format!("{key}/fopt/{}/{i}", f.name), Role::Option, o.label())
                    .value(o.value.clone())
                    .disabled(o.disabled);
                if o.disabled {
                    n
                } else {
                    n.option(format!("{}={}", f.name, o.value))
                }
            });
            group = group.child(
                RenderedNode::new(format!("{key}/list/{}", f.name), Role::Listbox, f.label())
                    .scrollable()
                    .children(items),
            );
        }
        group
    }
}

impl WidgetModel for FormModel {
    model_common!(Widget::Form);

    fn listener_snapshot(&self) -> Map<String, Value> {
        snapshot(&[to_value(&self.props), to_value(&self.state)])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        let set = self.props.fields.iter().fold(
            ToolSignature::new("setValue", "Fill any subset of the fields in one call"),
            |sig, f| {
                let ty = match f.kind {
                    FieldKind::Text => ParamType::String,
                    FieldKind::Number => ParamType::Number,
                    FieldKind::Select => ParamType::Enum,
                };
                sig.param(&f.name, ty, false)
            },
        );
        vec![set, ToolSignature::new("submit", "Validate and submit the form")]
    }

    fn metadata(&self) -> InteractionMetadata {
        let mut md = InteractionMetadata::default().tool("setValue").tool("submit");
        for f in &self.props.fields {
            let c = match f.kind {
                FieldKind::Text => ParamContract::of(ParamType::String).pattern(f.pattern.clone()),
                FieldKind::Number => {
                    ParamContract::of(ParamType::Number).range(f.min.map(Limit::Number), f.max.map(Limit::Number))
                }
                FieldKind::Select => ParamContract::enumeration(strings(f.enabled_options().map(|o| o.value.clone()))),
            };
            md = md.with("setValue", &f.name, c);
        }
        md
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["setValue", "submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "setValue" => {
                for (name, v) in params {
                    let f = self.field(name).ok_or_else(|| format!("no field `{name}`"))?;
                    f.check(v)?;
                    self.set(name, v.clone());
                }
                Ok(Vec::new())
            }
            "submit" => {
                let problems = self.problems();
                if !problems.is_empty() {
                    let list: Vec<String> = problems.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                    return Err(format!("form invalid ({})", list.join(", ")));
                }
                self.state.errors.clear();
                self.state.submitted = true;
                self.close();
                Ok(vec![self.submit_event(key)])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let mut root = RenderedNode::new(key, Role::Form, self.props.label.clone().unwrap_or_default())
            .children(self.props.fields.iter().map(|f| self.render_field(key, f)))
            .child(RenderedNode::new(format!("{key}/submit"), Role::Button, "Submit").name("submit"));
        if self.state.submitted || !self.state.errors.is_empty() {
            let text = if self.state.errors.is_empty() {
                "Submitted".to_string()
            } else {
                let list: Vec<String> = self.state.errors.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                list.join("; ")
            };
            root = root.child(RenderedNode::new(format!("{key}/status"), Role::Status, text));
        }
        root
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        let before = self.disclosed_ids();
        let mut events = Vec::new();
        match (verb, local.split_once('/')) {
            (AtomicVerb::Type { payload }, Some(("field", name))) => {
                let Some(f) = self.field(name) else {
                    return AtomicEffect::neutral();
                };
                let v = match f.kind {
                    FieldKind::Select => return AtomicEffect::rejected("not editable"),
                    FieldKind::Text => Value::String(payload.clone()),
                    FieldKind::Number => match payload.trim().parse::<f64>() {
                        Ok(n) if n.is_finite() => json!(n),
                        _ => return AtomicEffect::rejected("not a number"),
                    },
                };
                self.set(name, v);
            }
            (AtomicVerb::Type { .. }, _) => return AtomicEffect::rejected("not editable"),
            (AtomicVerb::Click, Some(("field", name))) => {
                if self.field(name).is_none_or(|f| f.kind != FieldKind::Select) {
                    return AtomicEffect::neutral();
                }
                if self.state.open.as_deref() == Some(name) {
                    self.close();
                } else {
                    self.close();
                    self.state.open = Some(name.to_string());
                }
            }
            (AtomicVerb::Click, Some(("fopt", rest))) => {
                let Some((name, i)) = rest.split_once('/') else {
                    return AtomicEffect::neutral();
                };
                let Some(opt) = self
                    .field(name)
                    .and_then(|f| f.options.get(i.parse::<usize>().ok()?))
                    .cloned()
                else {
                    return AtomicEffect::neutral();
                };
                self.set(name, Value::String(opt.value));
                self.close();
            }
            (AtomicVerb::Scroll { direction: ScrollDirection::Down }, Some(("list", name))) => {
                let total = self.field(name).map_or(0, |f| f.options.len());
                if self.state.loaded < total {
                    self.state.loaded += self.props.list_height;
                }
            }
            (AtomicVerb::Click, None) if local == "submit" => {
                let problems = self.problems();
                if problems.is_empty() {
                    self.state.errors.clear();
                    self.state.submitted = true;
                    self.close();
                    events.push(self.submit_event(key));
                } else {
                    self.state.errors = problems;
                    self.state.submitted = false;
                }
            }
            _ => return AtomicEffect::neutral(),
        }
        let after = self.disclosed_ids();
        let mut effect = if before.difference(&after).next().is_some() {
            AtomicEffect::conceal()
        } else if after.difference(&before).next().is_some() {
            AtomicEffect::reveal()
        } else {
            AtomicEffect::neutral()
        };
        effect.events = events;
        effect
    }
}

/// Select options as `field=value` pairs.
pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let fields = status.get("fields")?.as_array()?;
    let mut out = BTreeSet::new();
    for f in fields {
        let name = f.get("name").and_then(Value::as_str)?;
        let Some(opts) = f.get("options").and_then(Value::as_array) else {
            continue;
        };
        let enabled = opts
            .iter()
            .filter(|o| !o.get("disabled").and_then(Value::as_bool).unwrap_or(false))
            .map(|o| o.get("value"));
        out.extend(string_set(enabled).into_iter().map(|v| format!("{name}={v}")));
    }
    Some(out)
}
