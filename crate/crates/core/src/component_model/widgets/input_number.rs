use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{fmt_number, parse_props, snapshot, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, Limit, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

fn default_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InputNumberProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    min: Option<f64>,
    #[serde(default)]
    max: Option<f64>,
    #[serde(default = "default_step")]
    step: f64,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct InputNumberState {
    value: Option<f64>,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub(super) struct InputNumberModel {
    props: InputNumberProps,
    state: InputNumberState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: InputNumberProps = parse_props(props)?;
    if !(props.step > 0.0) {
        return Err(ComponentError::malformed("step", "must be positive"));
    }
    if let (Some(lo), Some(hi)) = (props.min, props.max) {
        if lo > hi {
            return Err(ComponentError::malformed("max", "below min"));
        }
    }
    Ok(Box::new(InputNumberModel {
        props,
        state: InputNumberState::default(),
    }))
}

impl InputNumberModel {
    fn in_range(&self, n: f64) -> bool {
        self.props.min.is_none_or(|lo| n >= lo) && self.props.max.is_none_or(|hi| n <= hi)
    }

    fn bump(&mut self, delta: f64) -> AtomicEffect {
        let base = self.state.value.unwrap_or(self.props.min.unwrap_or(0.0).max(0.0));
        let next = base + delta;
        if self.in_range(next) {
            self.state.value = Some(next);
            self.state.submitted = false;
        }
        AtomicEffect::neutral()
    }
}

impl WidgetModel for InputNumberModel {
    model_common!(Widget::InputNumber);

    fn listener_snapshot(&self) -> Map<String, Value> {
        snapshot(&[to_value(&self.props), to_value(&self.state)])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Set the number").param("value", ParamType::Number, true),
            ToolSignature::new("submit", "Submit the current number"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        let c = ParamContract::of(ParamType::Number)
            .range(self.props.min.map(Limit::Number), self.props.max.map(Limit::Number));
        InteractionMetadata::default().with("setValue", "value", c).tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, _params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "submit" => {
                self.state.submitted = true;
                Ok(vec![EnvEvent::new(key, EventKind::Submit, self.state.value.map(fmt_number))])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let value = self.state.value.map(fmt_number).unwrap_or_default();
        RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default())
            .child(RenderedNode::new(format!("{key}/input"), Role::Textbox, "").value(value))
            .child(RenderedNode::new(format!("{key}/up"), Role::Button, "Increase"))
            .child(RenderedNode::new(format!("{key}/down"), Role::Button, "Decrease"))
    }

    fn apply(&mut self, _key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Type { payload }, "input") => match payload.trim().parse::<f64>() {
                Ok(n) if n.is_finite() && self.in_range(n) => {
                    self.state.value = Some(n);
                    self.state.submitted = false;
                    AtomicEffect::neutral()
                }
                Ok(_) => AtomicEffect::rejected("out of range"),
                Err(_) => AtomicEffect::rejected("not a number"),
            },
            (AtomicVerb::Click, "up") => self.bump(self.props.step),
            (AtomicVerb::Click, "down") => self.bump(-self.props.step),
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}
