use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{parse_props, plain_id, snapshot, string_set, strings, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TabItem {
    key: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    disabled: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TabsProps {
    #[serde(default)]
    label: Option<String>,
    items: Vec<TabItem>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TabsState {
    active: String,
}

#[derive(Debug, Clone)]
pub(super) struct TabsModel {
    props: TabsProps,
    state: TabsState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: TabsProps = parse_props(props)?;
    let keys: BTreeSet<&str> = props.items.iter().map(|t| t.key.as_str()).collect();
    if keys.len() != props.items.len() || !props.items.iter().all(|t| plain_id(&t.key)) {
        return Err(ComponentError::malformed("items", "tab keys must be unique plain ids"));
    }
    let first = props
        .items
        .iter()
        .find(|t| !t.disabled)
        .ok_or_else(|| ComponentError::malformed("items", "needs an enabled tab"))?;
    let state = TabsState {
        active: first.key.clone(),
    };
    Ok(Box::new(TabsModel { props, state }))
}

impl TabsModel {
    fn enabled(&self) -> impl Iterator<Item = &TabItem> {
        self.props.items.iter().filter(|t| !t.disabled)
    }
}

impl WidgetModel for TabsModel {
    model_common!(Widget::Tabs);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let tabs: Vec<Value> = self
            .props
            .items
            .iter()
            .map(|t| json!({"key": t.key, "label": t.label.as_deref().unwrap_or(&t.key), "disabled": t.disabled}))
            .collect();
        snapshot(&[to_value(&self.props), to_value(&self.state), json!({ "tabs": tabs })])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![ToolSignature::new("navigateTo", "Activate a tab").param("target", ParamType::Enum, true)]
    }

    fn metadata(&self) -> InteractionMetadata {
        let keys = self.enabled().map(|t| t.key.clone());
        InteractionMetadata::default().with("navigateTo", "target", ParamContract::enumeration(strings(keys)))
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["navigateTo"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        if tool != "navigateTo" {
            return Err(format!("no handler for `{tool}`"));
        }
        let target = params.get("target").and_then(Value::as_str).ok_or("target must be a string")?;
        if !self.enabled().any(|t| t.key == target) {
            return Err(format!("no tab `{target}`"));
        }
        self.state.active = target.to_string();
        Ok(vec![EnvEvent::new(key, EventKind::Navigate, Some(target.to_string()))])
    }

    fn render(&self, key: &str) -> RenderedNode {
        let tabs = self.props.items.iter().map(|t| {
            let n = RenderedNode::new(format!("{key}/tab/{}", t.key), Role::Tab, t.label.as_deref().unwrap_or(&t.key))
                .value(t.key.clone())
                .disabled(t.disabled)
                .selected(t.key == self.state.active);
            if t.disabled {
                n
            } else {
                n.option(t.key.clone())
            }
        });
        RenderedNode::new(key, Role::TabList, self.props.label.clone().unwrap_or_default()).children(tabs)
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local.strip_prefix("tab/")) {
            (AtomicVerb::Click, Some(tab)) => {
                self.state.active = tab.to_string();
                AtomicEffect::neutral().event(EnvEvent::new(key, EventKind::Navigate, Some(tab.to_string())))
            }
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let tabs = status.get("tabs")?.as_array()?;
    Some(string_set(
        tabs.iter()
            .filter(|t| !t.get("disabled").and_then(Value::as_bool).unwrap_or(false))
            .map(|t| t.get("key")),
    ))
}
