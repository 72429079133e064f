use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{parse_props, snapshot, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SwitchProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    default_checked: bool,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct SwitchState {
    value: bool,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub(super) struct SwitchModel {
    props: SwitchProps,
    state: SwitchState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: SwitchProps = parse_props(props)?;
    let state = SwitchState {
        value: props.default_checked,
        submitted: false,
    };
    Ok(Box::new(SwitchModel { props, state }))
}

impl WidgetModel for SwitchModel {
    model_common!(Widget::Switch);

    fn listener_snapshot(&self) -> Map<String, Value> {
        snapshot(&[to_value(&self.props), to_value(&self.state)])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Turn the switch on or off").param("value", ParamType::Boolean, true),
            ToolSignature::new("submit", "Submit the current position"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        InteractionMetadata::default()
            .with("setValue", "value", ParamContract::of(ParamType::Boolean))
            .tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, _params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "submit" => {
                self.state.submitted = true;
                Ok(vec![EnvEvent::new(key, EventKind::Submit, Some(self.state.value.to_string()))])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default()).child(
            RenderedNode::new(format!("{key}/switch"), Role::Switch, self.props.label.clone().unwrap_or_default())
                .value(self.state.value.to_string())
                .selected(self.state.value),
        )
    }

    fn apply(&mut self, _key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Click, "switch") => {
                self.state.value = !self.state.value;
                self.state.submitted = false;
                AtomicEffect::neutral()
            }
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}
