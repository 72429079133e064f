//! Page navigator that only shows a window of page buttons around the current page.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{disclosure_between, parse_props, snapshot, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, Limit, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

/// Pages shown on either side of the current page.
const WINDOW: u32 = 2;

fn default_page_size() -> u32 {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PaginationProps {
    #[serde(default)]
    label: Option<String>,
    total: u32,
    #[serde(default = "default_page_size")]
    page_size: u32,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PaginationState {
    current: u32,
}

#[derive(Debug, Clone)]
pub(super) struct PaginationModel {
    props: PaginationProps,
    state: PaginationState,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: PaginationProps = parse_props(props)?;
    if props.page_size == 0 {
        return Err(ComponentError::malformed("page_size", "must be positive"));
    }
    Ok(Box::new(PaginationModel {
        props,
        state: PaginationState { current: 1 },
    }))
}

impl PaginationModel {
    fn pages(&self) -> u32 {
        self.props.total.div_ceil(self.props.page_size).max(1)
    }

    fn visible(&self) -> BTreeSet<u32> {
        let c = self.state.current;
        let mut set: BTreeSet<u32> = (c.saturating_sub(WINDOW).max(1)..=(c + WINDOW).min(self.pages())).collect();
        set.insert(1);
        set.insert(self.pages());
        set
    }

    fn go(&mut self, key: &str, page: u32) -> AtomicEffect {
        if page == self.state.current || page < 1 || page > self.pages() {
            return AtomicEffect::neutral();
        }
        let before = self.render(key);
        self.state.current = page;
        disclosure_between(&before, &self.render(key)).event(EnvEvent::new(key, EventKind::Navigate, Some(page.to_string())))
    }
}

impl WidgetModel for PaginationModel {
    model_common!(Widget::Pagination);

    fn listener_snapshot(&self) -> Map<String, Value> {
        snapshot(&[to_value(&self.props), to_value(&self.state), json!({ "pages": self.pages() })])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![ToolSignature::new("navigateTo", "Jump to a page number").param("target", ParamType::Number, true)]
    }

    fn metadata(&self) -> InteractionMetadata {
        let c = ParamContract::of(ParamType::Number)
            .range(Some(Limit::Number(1.0)), Some(Limit::Number(self.pages() as f64)));
        InteractionMetadata::default().with("navigateTo", "target", c)
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["navigateTo"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        if tool != "navigateTo" {
            return Err(format!("no handler for `{tool}`"));
        }
        let n = params.get("target").and_then(Value::as_f64).ok_or("target must be a number")?;
        if n.fract() != 0.0 || n < 1.0 || n > self.pages() as f64 {
            return Err(format!("no page {n}"));
        }
        self.state.current = n as u32;
        Ok(vec![EnvEvent::new(key, EventKind::Navigate, Some(self.state.current.to_string()))])
    }

    fn render(&self, key: &str) -> RenderedNode {
        let c = self.state.current;
        let mut root = RenderedNode::new(key, Role::Navigation, self.props.label.clone().unwrap_or_default())
            .child(RenderedNode::new(format!("{key}/prev"), Role::Button, "Previous page").disabled(c == 1));
        for p in self.visible() {
            root = root.child(
                RenderedNode::new(format!("{key}/page/{p}"), Role::Button, p.to_string())
                    .value(p.to_string())
                    .option(p.to_string())
                    .selected(p == c),
            );
        }
        root.child(RenderedNode::new(format!("{key}/next"), Role::Button, "Next page").disabled(c == self.pages()))
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match (verb, local) {
            (AtomicVerb::Click, "prev") => self.go(key, self.state.current - 1),
            (AtomicVerb::Click, "next") => self.go(key, self.state.current + 1),
            (AtomicVerb::Click, l) => match l.strip_prefix("page/").and_then(|p| p.parse().ok()) {
                Some(p) => self.go(key, p),
                None => AtomicEffect::neutral(),
            },
            (AtomicVerb::Type { .. }, _) => AtomicEffect::rejected("not editable"),
            _ => AtomicEffect::neutral(),
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let pages = status.get("pages")?.as_u64()?;
    Some((1..=pages).map(|p| p.to_string()).collect())
}
