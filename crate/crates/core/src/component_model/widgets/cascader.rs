//! Multi-level linked selection (province / city / district). Clicking an option reveals
//! only the next level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{parse_props, snapshot, string_set, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract, ParamType,
    Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CascaderOption {
    value: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<CascaderOption>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    disabled: bool,
}

impl CascaderOption {
    fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.value)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CascaderProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    placeholder: Option<String>,
    options: Vec<CascaderOption>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct CascaderState {
    /// Selected path of option values, root first.
    value: Option<Vec<String>>,
    open: bool,
    /// Index path of expanded options; column `i + 1` shows children of `active[..=i]`.
    active: Vec<usize>,
    submitted: bool,
}

#[derive(Debug, Clone)]
struct Leaf {
    path: Vec<String>,
    labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub(super) struct CascaderModel {
    props: CascaderProps,
    state: CascaderState,
    leaves: Vec<Leaf>,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: CascaderProps = parse_props(props)?;
    if props.options.is_empty() {
        return Err(ComponentError::malformed("options", "must not be empty"));
    }
    let mut leaves = Vec::new();
    collect_leaves(&props.options, &mut Vec::new(), &mut Vec::new(), &mut leaves)?;
    Ok(Box::new(CascaderModel {
        props,
        state: CascaderState::default(),
        leaves,
    }))
}

fn collect_leaves(
    options: &[CascaderOption],
    path: &mut Vec<String>,
    labels: &mut Vec<String>,
    out: &mut Vec<Leaf>,
) -> Result<(), ComponentError> {
    let mut seen = BTreeSet::new();
    for opt in options {
        if opt.value.is_empty() || !seen.insert(opt.value.as_str()) {
            return Err(ComponentError::malformed(
                "options",
                format!("empty or duplicate sibling value `{}`", opt.value),
            ));
        }
        if opt.disabled {
            continue;
        }
        path.push(opt.value.clone());
        labels.push(opt.label().to_string());
        if opt.children.is_empty() {
            out.push(Leaf {
                path: path.clone(),
                labels: labels.clone(),
            });
        } else {
            collect_leaves(&opt.children, path, labels, out)?;
        }
        path.pop();
        labels.pop();
    }
    Ok(())
}

impl CascaderModel {
    fn column(&self, level: usize) -> &[CascaderOption] {
        let mut opts = &self.props.options[..];
        for &i in &self.state.active[..level] {
            opts = &opts[i].children;
        }
        opts
    }

    fn option_at(&self, idx: &[usize]) -> Option<&CascaderOption> {
        let mut opts = &self.props.options[..];
        let mut found = None;
        for &i in idx {
            let o = opts.get(i)?;
            found = Some(o);
            opts = &o.children;
        }
        found
    }

    fn display(&self) -> (String, String) {
        match &self.state.value {
            Some(path) => {
                let labels = self
                    .leaves
                    .iter()
                    .find(|l| &l.path == path)
                    .map(|l| l.labels.join(" / "))
                    .unwrap_or_else(|| path.join(" / "));
                (labels, path.last().cloned().unwrap_or_default())
            }
            None => (
                self.props.placeholder.clone().unwrap_or_else(|| "Please select".into()),
                String::new(),
            ),
        }
    }

    /// Leaf values that name exactly one leaf.
    fn unique_leaf_values(&self) -> Vec<String> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for l in &self.leaves {
            *counts.entry(l.path.last().expect("non-empty path")).or_default() += 1;
        }
        let mut out = Vec::new();
        for l in &self.leaves {
            let v = l.path.last().expect("non-empty path");
            if counts[v.as_str()] == 1 {
                out.push(v.clone());
            }
        }
        out
    }

    fn resolve(&self, value: &Value) -> Result<Vec<String>, String> {
        match value {
            Value::String(leaf) => {
                let hits: Vec<&Leaf> = self
                    .leaves
                    .iter()
                    .filter(|l| l.path.last() == Some(leaf))
                    .collect();
                match hits.as_slice() {
                    [one] => Ok(one.path.clone()),
                    [] => Err(format!("no leaf `{leaf}`")),
                    _ => Err(format!("leaf `{leaf}` is ambiguous")),
                }
            }
            Value::Array(items) => {
                let path: Vec<String> = items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string))
                    .collect::<Option<_>>()
                    .ok_or("path elements must be strings")?;
                self.leaves
                    .iter()
                    .find(|l| l.path == path)
                    .map(|l| l.path.clone())
                    .ok_or_else(|| format!("no leaf path {path:?}"))
            }
            _ => Err("expected a leaf value or a path".into()),
        }
    }

    fn reset_panel(&mut self) {
        self.state.open = false;
        self.state.active.clear();
    }
}

fn option_id(key: &str, idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(usize::to_string).collect();
    format!("{key}/opt/{}", parts.join("-"))
}

impl WidgetModel for CascaderModel {
    model_common!(Widget::Cascader);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let candidates: Vec<Value> = self
            .leaves
            .iter()
            .map(|l| {
                json!({
                    "value": l.path.last(),
                    "label": l.labels.last(),
                    "path": l.path,
                })
            })
            .collect();
        snapshot(&[
            to_value(&self.props),
            to_value(&self.state),
            json!({ "candidates": candidates }),
        ])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Select a leaf option by its value, or by the full path of values")
                .param("value", ParamType::Enum, true),
            ToolSignature::new("submit", "Confirm the current selection"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        let mut allowed: Vec<Value> = self.unique_leaf_values().into_iter().map(Value::String).collect();
        allowed.extend(self.leaves.iter().map(|l| to_value(&l.path)));
        InteractionMetadata::default()
            .with("setValue", "value", ParamContract::enumeration(allowed))
            .tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["setValue", "submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "setValue" => {
                let path = self.resolve(params.get("value").unwrap_or(&Value::Null))?;
                self.state.value = Some(path);
                self.state.submitted = false;
                self.reset_panel();
                Ok(Vec::new())
            }
            "submit" => {
                self.state.submitted = true;
                let value = self.state.value.as_ref().and_then(|p| p.last().cloned());
                Ok(vec![EnvEvent::new(key, EventKind::Submit, value)])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let (display, value) = self.display();
        let mut root = RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default());
        root = root.child(
            RenderedNode::new(format!("{key}/trigger"), Role::Combobox, display)
                .value(value)
                .expanded(self.state.open),
        );
        if self.state.open {
            for level in 0..=self.state.active.len() {
                let prefix = &self.state.active[..level];
                let column = self.column(level);
                let items = column.iter().enumerate().map(|(i, opt)| {
                    let mut idx = prefix.to_vec();
                    idx.push(i);
                    let mut node = RenderedNode::new(option_id(key, &idx), Role::Option, opt.label())
                        .value(opt.value.clone())
                        .disabled(opt.disabled);
                    if opt.children.is_empty() {
                        if !opt.disabled {
                            node = node.option(opt.value.clone());
                        }
                    } else {
                        node = node.expanded(self.state.active.get(level) == Some(&i));
                    }
                    node
                });
                root = root.child(
                    RenderedNode::new(format!("{key}/col/{level}"), Role::Listbox, format!("Level {}", level + 1))
                        .children(items),
                );
            }
        }
        root
    }

    fn apply(&mut self, _key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        if !matches!(verb, AtomicVerb::Click) {
            return match verb {
                AtomicVerb::Type { .. } => AtomicEffect::rejected("not editable"),
                _ => AtomicEffect::neutral(),
            };
        }
        if local == "trigger" {
            return if self.state.open {
                self.reset_panel();
                AtomicEffect::conceal()
            } else {
                self.state.open = true;
                AtomicEffect::reveal()
            };
        }
        let Some(idx) = local.strip_prefix("opt/").and_then(|s| {
            s.split('-').map(|p| p.parse::<usize>().ok()).collect::<Option<Vec<_>>>()
        }) else {
            return AtomicEffect::neutral();
        };
        let Some(opt) = self.option_at(&idx) else {
            return AtomicEffect::neutral();
        };
        let level = idx.len() - 1;
        if opt.children.is_empty() {
            let path = {
                let mut opts = &self.props.options[..];
                idx.iter()
                    .map(|&i| {
                        let o = &opts[i];
                        opts = &o.children;
                        o.value.clone()
                    })
                    .collect()
            };
            self.state.value = Some(path);
            self.state.submitted = false;
            self.reset_panel();
            return AtomicEffect::conceal();
        }
        if self.state.active.get(level) == Some(&idx[level]) && self.state.active.len() == level + 1 {
            return AtomicEffect::neutral();
        }
        let extends = self.state.active.len() == level;
        self.state.active.truncate(level);
        self.state.active.push(idx[level]);
        if extends {
            AtomicEffect::reveal()
        } else {
            AtomicEffect::conceal()
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let list = status.get("candidates")?.as_array()?;
    Some(string_set(list.iter().map(|c| c.get("value"))))
}
