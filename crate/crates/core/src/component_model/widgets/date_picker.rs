//! Calendar date picker. The panel shows one month at a time; moving between months takes
//! one click each, and typed input must match the display format exactly.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{parse_props, snapshot, strings, to_value};
use crate::component_model::datefmt::{self, DateFormat};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, Limit, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

fn default_format() -> String {
    "YYYY-MM-DD".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DatePickerProps {
    #[serde(default)]
    label: Option<String>,
    #[serde(default = "default_format")]
    format: String,
    /// ISO `YYYY-MM-DD`, like every date in props.
    min: String,
    max: String,
    #[serde(default)]
    disabled_dates: Vec<String>,
    #[serde(default)]
    input_read_only: bool,
    /// Month shown when the panel first opens (`YYYY-MM` or a full ISO date).
    #[serde(default)]
    default_panel: Option<String>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DatePickerState {
    /// ISO date.
    value: Option<String>,
    open: bool,
    /// ISO date of the first day of the displayed month.
    panel: String,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub(super) struct DatePickerModel {
    props: DatePickerProps,
    state: DatePickerState,
    format: DateFormat,
    min: NaiveDate,
    max: NaiveDate,
    disabled: BTreeSet<NaiveDate>,
    default_panel: NaiveDate,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: DatePickerProps = parse_props(props)?;
    let format: DateFormat = props
        .format
        .parse()
        .map_err(|e: datefmt::BadDateFormat| ComponentError::malformed("format", e.to_string()))?;
    let iso = |field: &str, s: &str| {
        datefmt::parse_iso(s).ok_or_else(|| ComponentError::malformed(field, format!("`{s}` is not YYYY-MM-DD")))
    };
    let min = iso("min", &props.min)?;
    let max = iso("max", &props.max)?;
    if min > max {
        return Err(ComponentError::malformed("max", "must not precede min"));
    }
    let disabled = props
        .disabled_dates
        .iter()
        .map(|d| iso("disabled_dates", d))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let min_month = datefmt::month_start(min);
    let max_month = datefmt::month_start(max);
    let default_panel = match &props.default_panel {
        Some(p) => {
            let full = if p.len() == 7 { format!("{p}-01") } else { p.clone() };
            datefmt::month_start(iso("default_panel", &full)?)
        }
        None => min_month,
    }
    .clamp(min_month, max_month);
    let state = DatePickerState {
        value: None,
        open: false,
        panel: default_panel.to_string(),
        submitted: false,
    };
    Ok(Box::new(DatePickerModel {
        props,
        state,
        format,
        min,
        max,
        disabled,
        default_panel,
    }))
}

impl DatePickerModel {
    fn selectable(&self, d: NaiveDate) -> bool {
        d >= self.min && d <= self.max && !self.disabled.contains(&d)
    }

    fn panel(&self) -> NaiveDate {
        datefmt::parse_iso(&self.state.panel).unwrap_or(self.default_panel)
    }

    fn value(&self) -> Option<NaiveDate> {
        self.state.value.as_deref().and_then(datefmt::parse_iso)
    }

    fn close(&mut self) {
        self.state.open = false;
        let month = self.value().map(datefmt::month_start).unwrap_or(self.default_panel);
        self.state.panel = month.to_string();
    }

    fn commit(&mut self, d: NaiveDate) {
        self.state.value = Some(d.to_string());
        self.state.submitted = false;
        self.close();
    }

    fn formatted_value(&self) -> Option<String> {
        self.value().map(|d| self.format.format(d))
    }
}

impl WidgetModel for DatePickerModel {
    model_common!(Widget::DatePicker);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let disabled: Vec<String> = self.disabled.iter().map(|d| self.format.format(*d)).collect();
        snapshot(&[
            to_value(&self.props),
            to_value(&self.state),
            json!({
                "value": self.formatted_value(),
                "min": self.format.format(self.min),
                "max": self.format.format(self.max),
                "disabled_dates": disabled,
            }),
        ])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("setValue", "Set the date; must match the declared date_format")
                .param("value", ParamType::Date, true),
            ToolSignature::new("submit", "Confirm the chosen date"),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        let mut contract = ParamContract::of(ParamType::Date).range(
            Some(Limit::Date(self.format.format(self.min))),
            Some(Limit::Date(self.format.format(self.max))),
        );
        contract.runtime.date_format = Some(self.format.pattern().to_string());
        if !self.disabled.is_empty() {
            contract.runtime.excluded_values =
                Some(strings(self.disabled.iter().map(|d| self.format.format(*d))));
        }
        InteractionMetadata::default()
            .with("setValue", "value", contract)
            .tool("submit")
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["setValue", "submit"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        match tool {
            "setValue" => {
                let text = params.get("value").and_then(Value::as_str).ok_or("value must be a string")?;
                let d = self
                    .format
                    .parse(text)
                    .ok_or_else(|| format!("`{text}` does not match {}", self.format))?;
                if !self.selectable(d) {
                    return Err(format!("{text} is not selectable"));
                }
                self.commit(d);
                Ok(Vec::new())
            }
            "submit" => {
                self.state.submitted = true;
                Ok(vec![EnvEvent::new(key, EventKind::Submit, self.formatted_value())])
            }
            other => Err(format!("no handler for `{other}`")),
        }
    }

    fn render(&self, key: &str) -> RenderedNode {
        let display = self.formatted_value().unwrap_or_else(|| self.format.pattern().to_string());
        let mut root = RenderedNode::new(key, Role::Group, self.props.label.clone().unwrap_or_default()).child(
            RenderedNode::new(format!("{key}/input"), Role::Combobox, display)
                .value(self.formatted_value().unwrap_or_default())
                .readonly(self.props.input_read_only)
                .expanded(self.state.open),
        );
        if self.state.open {
            let panel = self.panel();
            let value = self.value();
            let header = datefmt::month_label(panel);
            let mut grid = RenderedNode::new(format!("{key}/panel"), Role::Grid, header.clone())
                .child(RenderedNode::new(format!("{key}/header"), Role::Heading, header.clone()).value(header))
                .child(
                    RenderedNode::new(format!("{key}/prev"), Role::Button, "Previous month")
                        .disabled(panel <= datefmt::month_start(self.min)),
                )
                .child(
                    RenderedNode::new(format!("{key}/next"), Role::Button, "Next month")
                        .disabled(panel >= datefmt::month_start(self.max)),
                );
            for d in datefmt::days_in_month(panel) {
                let ok = self.selectable(d);
                let mut cell = RenderedNode::new(format!("{key}/day/{d}"), Role::GridCell, d.format("%-d").to_string())
                    .value(d.to_string())
                    .disabled(!ok)
                    .selected(value == Some(d));
                if ok {
                    cell = cell.option(self.format.format(d));
                }
                grid = grid.child(cell);
            }
            root = root.child(grid);
        }
        root
    }

    fn apply(&mut self, _key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Click, "input") => {
                if self.state.open {
                    self.close();
                    AtomicEffect::conceal()
                } else {
                    self.state.open = true;
                    AtomicEffect::reveal()
                }
            }
            (AtomicVerb::Click, "prev" | "next") => {
                let delta = if local == "next" { 1 } else { -1 };
                self.state.panel = datefmt::add_months(self.panel(), delta).to_string();
                AtomicEffect::conceal()
            }
            (AtomicVerb::Click, l) if l.starts_with("day/") => match datefmt::parse_iso(&l[4..]) {
                Some(d) if self.selectable(d) => {
                    self.commit(d);
                    AtomicEffect::conceal()
                }
                _ => AtomicEffect::neutral(),
            },
            (AtomicVerb::Type { payload }, "input") => {
                if self.props.input_read_only {
                    return AtomicEffect::rejected("input is read-only");
                }
                match self.format.parse(payload) {
                    None => AtomicEffect::rejected(format!("`{payload}` does not match {}", self.format)),
                    Some(d) if !self.selectable(d) => AtomicEffect::rejected(format!("{payload} is not selectable")),
                    Some(d) => {
                        let was_open = self.state.open;
                        self.commit(d);
                        if was_open {
                            AtomicEffect::conceal()
                        } else {
                            AtomicEffect::neutral()
                        }
                    }
                }
            }
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let format: DateFormat = status.get("format")?.as_str()?.parse().ok()?;
    let min = format.parse(status.get("min")?.as_str()?)?;
    let max = format.parse(status.get("max")?.as_str()?)?;
    let disabled: BTreeSet<&str> = status
        .get("disabled_dates")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    Some(
        min.iter_days()
            .take_while(|d| *d <= max)
            .map(|d| format.format(d))
            .filter(|s| !disabled.contains(s.as_str()))
            .collect(),
    )
}
