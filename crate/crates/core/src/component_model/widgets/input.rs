use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{parse_props, snapshot, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InputProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    placeholder: Option<String>,
    #[serde(default)]
    pattern: Option<String>,
    /// Renders a search button next to the text box.
    #[serde(default)]
    search: bool,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct InputState {
    value: String,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub(super) struct InputModel {
    props: InputProps,
    state: InputState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: InputProps = parse_props(props)?;
    if let Some(p) = &props.pattern {
        Regex::new(p).map_err(|e| ComponentError::malformed("pattern", e.to_string()))?;
    }
    Ok(Box::new(InputModel {
        props,
        state: InputState::default(),
    }))
}

impl WidgetModel for InputModel {
    model_common!(Widget::Input);

    fn listener_snapshot(&self) -> Map<String, Value> {
        snapshot(&[to_value(&self.props), to_value(&self.state)])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Replace the text").param("value", ParamType::String, true),
            ToolSignature::new("submit", "Submit the current text"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        InteractionMetadata::default()
            .with(
                "setValue",
                "value",
                ParamContract::of(ParamType::String).pattern(self.props.pattern.clone()),
            )
            .tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, _params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "submit" => {
                self.state.submitted = true;
                Ok(vec![EnvEvent::new(key, EventKind::Submit, Some(self.state.value.clone()))])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let mut root = RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default()).child(
            RenderedNode::new(
                format!("{key}/input"),
                Role::Textbox,
                self.props.placeholder.clone().unwrap_or_default(),
            )
            .value(self.state.value.clone()),
        );
        if self.props.search {
            root = root.child(RenderedNode::new(format!("{key}/search"), Role::Button, "Search").name("submit"));
        }
        root
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Type { payload }, "input") => {
                self.state.value = payload.clone();
                self.state.submitted = false;
                AtomicEffect::neutral()
            }
            (AtomicVerb::Click, "search") => {
                self.state.submitted = true;
                AtomicEffect::neutral().event(EnvEvent::new(key, EventKind::Submit, Some(self.state.value.clone())))
            }
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}
