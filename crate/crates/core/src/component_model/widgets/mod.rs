//! Built-in widget catalog.

macro_rules! model_common {
    ($widget:expr) => {
        fn widget(&self) -> $crate::component_model::Widget {
            $widget
        }

        fn state(&self) -> serde_json::Value {
            serde_json::to_value(&self.state).expect("state serializes")
        }

        fn restore(&mut self, state: serde_json::Value) -> Result<(), String> {
            self.state = serde_json::from_value(state).map_err(|e| e.to_string())?;
            Ok(())
        }

        fn clone_box(&self) -> Box<dyn $crate::component_model::WidgetModel> {
            Box::new(self.clone())
        }
    };
}

mod cascader;
mod date_picker;
mod form;
mod input;
mod input_number;
mod menu;
mod pagination;
mod select;
mod switch;
mod table;
mod tabs;

use std::collections::BTreeSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{AtomicEffect, ComponentError, RenderedNode, Widget, WidgetModel};

type BuildFn = fn(&Value) -> Result<Box<dyn WidgetModel>, ComponentError>;
type CandidatesFn = fn(&Value) -> Option<BTreeSet<String>>;

/// Registration record for one widget: how to build it and how to read its candidate set
/// back out of a semantic view.
pub struct WidgetEntry {
    pub widget: Widget,
    pub build: BuildFn,
    pub candidates: CandidatesFn,
}

const CATALOG: &[WidgetEntry] = &[
    WidgetEntry { widget: Widget::Menu, build: menu::build, candidates: menu::candidates },
    WidgetEntry { widget: Widget::Tabs, build: tabs::build, candidates: tabs::candidates },
    WidgetEntry { widget: Widget::Pagination, build: pagination::build, candidates: pagination::candidates },
    WidgetEntry { widget: Widget::Input, build: input::build, candidates: no_candidates },
    WidgetEntry { widget: Widget::InputNumber, build: input_number::build, candidates: no_candidates },
    WidgetEntry { widget: Widget::Select, build: select::build, candidates: select::candidates },
    WidgetEntry { widget: Widget::Cascader, build: cascader::build, candidates: cascader::candidates },
    WidgetEntry { widget: Widget::DatePicker, build: date_picker::build, candidates: date_picker::candidates },
    WidgetEntry { widget: Widget::Switch, build: switch::build, candidates: no_candidates },
    WidgetEntry { widget: Widget::Form, build: form::build, candidates: form::candidates },
    WidgetEntry { widget: Widget::Table, build: table::build, candidates: table::candidates },
];

pub fn catalog() -> &'static [WidgetEntry] {
    CATALOG
}

fn entry(widget: Widget) -> &'static WidgetEntry {
    CATALOG
        .iter()
        .find(|e| e.widget == widget)
        .expect("every widget is registered")
}

pub(crate) fn build(widget: Widget, props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    (entry(widget).build)(props)
}

pub(crate) fn candidates(widget: Widget, status: &Value) -> Option<BTreeSet<String>> {
    (entry(widget).candidates)(status)
}

fn no_candidates(_: &Value) -> Option<BTreeSet<String>> {
    None
}

/// Deserializes props, naming the offending field on failure.
fn parse_props<T: DeserializeOwned>(props: &Value) -> Result<T, ComponentError> {
    serde_path_to_error::deserialize(props.clone()).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "props".to_string() } else { path };
        let reason = e.into_inner().to_string();
        // serde reports a missing field at the parent path; pull the name out of the message
        let field = reason
            .strip_prefix("missing field `")
            .and_then(|r| r.split('`').next())
            .map(str::to_string)
            .unwrap_or(field);
        ComponentError::malformed(field, reason)
    })
}

/// Merges serialized props, state and derived fields into one listener snapshot.
fn snapshot(parts: &[Value]) -> Map<String, Value> {
    let mut out = Map::new();
    for part in parts {
        if let Value::Object(m) = part {
            out.extend(m.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("widget data serializes")
}

fn strings(values: impl IntoIterator<Item = String>) -> Vec<Value> {
    values.into_iter().map(Value::String).collect()
}

fn plain_id(id: &str) -> bool {
    !id.is_empty() && !id.contains('/') && !id.contains(char::is_whitespace)
}

/// Renders integral floats without a fractional part.
fn fmt_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        n.to_string()
    }
}

fn string_set<'a>(items: impl IntoIterator<Item = Option<&'a Value>>) -> BTreeSet<String> {
    items
        .into_iter()
        .flatten()
        .map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect()
}

/// A selectable option shared by several widgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OptionItem {
    value: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    disabled: bool,
}

impl OptionItem {
    fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.value)
    }

    fn view(&self) -> Value {
        serde_json::json!({"value": self.value, "label": self.label(), "disabled": self.disabled})
    }
}


/// Classifies a re-render: any removal counts as a collapse, pure growth as a reveal.
fn disclosure_between(before: &RenderedNode, after: &RenderedNode) -> AtomicEffect {
    let old: BTreeSet<&str> = before.walk().into_iter().map(|n| n.id.as_str()).collect();
    let new: BTreeSet<&str> = after.walk().into_iter().map(|n| n.id.as_str()).collect();
    if old.difference(&new).next().is_some() {
        AtomicEffect::conceal()
    } else if new.difference(&old).next().is_some() {
        AtomicEffect::reveal()
    } else {
        AtomicEffect::neutral()
    }
}

/// Text form of a cell or field value.
fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(fmt_number).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}
