//! Dropdown select with a virtualised option list: scrolling loads the next page of options.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{parse_props, snapshot, string_set, strings, to_value, OptionItem};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract,
    ParamType, Params, RenderedNode, Role, ScrollDirection, ToolSignature, Widget, WidgetModel,
};

fn default_list_height() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SelectProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    placeholder: Option<String>,
    options: Vec<OptionItem>,
    #[serde(default = "default_list_height")]
    list_height: usize,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SelectState {
    value: Option<String>,
    open: bool,
    loaded: usize,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub(super) struct SelectModel {
    props: SelectProps,
    state: SelectState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: SelectProps = parse_props(props)?;
    if props.options.is_empty() {
        return Err(ComponentError::malformed("options", "must not be empty"));
    }
    if props.list_height == 0 {
        return Err(ComponentError::malformed("list_height", "must be positive"));
    }
    let distinct: BTreeSet<&str> = props.options.iter().map(|o| o.value.as_str()).collect();
    if distinct.len() != props.options.len() {
        return Err(ComponentError::malformed("options", "duplicate option value"));
    }
    let state = SelectState {
        value: None,
        open: false,
        loaded: props.list_height,
        submitted: false,
    };
    Ok(Box::new(SelectModel { props, state }))
}

impl SelectModel {
    fn close(&mut self) {
        self.state.open = false;
        self.state.loaded = self.props.list_height;
    }
}

impl WidgetModel for SelectModel {
    model_common!(Widget::Select);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let options: Vec<Value> = self.props.options.iter().map(OptionItem::view).collect();
        snapshot(&[to_value(&self.props), to_value(&self.state), json!({ "options": options })])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Choose one of the enabled options").param("value", ParamType::Enum, true),
            ToolSignature::new("submit", "Confirm the current selection"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        let enabled = self
            .props
            .options
            .iter()
            .filter(|o| !o.disabled)
            .map(|o| o.value.clone());
        InteractionMetadata::default()
            .with("setValue", "value", ParamContract::enumeration(strings(enabled)))
            .tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, _params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "submit" => {
                self.state.submitted = true;
                Ok(vec![EnvEvent::new(key, EventKind::Submit, self.state.value.clone())])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let selected = self
            .state
            .value
            .as_ref()
            .and_then(|v| self.props.options.iter().find(|o| &o.value == v));
        let display = selected
            .map(|o| o.label().to_string())
            .or_else(|| self.props.placeholder.clone())
            .unwrap_or_else(|| "Please select".into());
        let mut root = RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default()).child(
            RenderedNode::new(format!("{key}/trigger"), Role::Combobox, display)
                .value(self.state.value.clone().unwrap_or_default())
                .expanded(self.state.open),
        );
        if self.state.open {
            let shown = self.state.loaded.min(self.props.options.len());
            let items = self.props.options[..shown].iter().enumerate().map(|(i, o)| {
                let mut n = RenderedNode::new(format!("{key}/opt/{i}"), Role::Option, o.label())
                    .value(o.value.clone())
                    .disabled(o.disabled)
                    .selected(self.state.value.as_deref() == Some(o.value.as_str()));
                if !o.disabled {
                    n = n.option(o.value.clone());
                }
                n
            });
            root = root.child(
                RenderedNode::new(format!("{key}/list"), Role::Listbox, "Options")
                    .scrollable()
                    .children(items),
            );
        }
        root
    }

    fn apply(&mut self, _key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Click, "trigger") => {
                if self.state.open {
                    self.close();
                    AtomicEffect::conceal()
                } else {
                    self.state.open = true;
                    AtomicEffect::reveal()
                }
            }
            (AtomicVerb::Click, l) if l.starts_with("opt/") => {
                let Some(opt) = l[4..].parse::<usize>().ok().and_then(|i| self.props.options.get(i)) else {
                    return AtomicEffect::neutral();
                };
                self.state.value = Some(opt.value.clone());
                self.state.submitted = false;
                self.close();
                AtomicEffect::conceal()
            }
            (AtomicVerb::Scroll { direction: ScrollDirection::Down }, "list") => {
                if self.state.loaded < self.props.options.len() {
                    self.state.loaded += self.props.list_height;
                    AtomicEffect::reveal()
                } else {
                    AtomicEffect::neutral()
                }
            }
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let options = status.get("options")?.as_array()?;
    Some(string_set(
        options
            .iter()
            .filter(|o| !o.get("disabled").and_then(Value::as_bool).unwrap_or(false))
            .map(|o| o.get("value")),
    ))
}
