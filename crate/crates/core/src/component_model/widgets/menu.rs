//! Navigation menu with collapsible sub-menus; leaves are routes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{parse_props, plain_id, snapshot, string_set, strings, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, EventKind, InteractionMetadata, ParamContract,
    ParamType, Params, RenderedNode, Role, ToolSignature, Widget, WidgetModel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MenuItem {
    key: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<MenuItem>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    disabled: bool,
}

impl MenuItem {
    fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.key)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MenuProps {
    #[serde(default)]
    label: Option<String>,
    items: Vec<MenuItem>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct MenuState {
    current: Option<String>,
    /// Keys of expanded sub-menus.
    open: Vec<String>,
}

#[derive(Debug, Clone)]
struct Route {
    route: String,
    labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub(super) struct MenuModel {
    props: MenuProps,
    state: MenuState,
    routes: Vec<Route>,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: MenuProps = parse_props(props)?;
    if props.items.is_empty() {
        return Err(ComponentError::malformed("items", "must not be empty"));
    }
    let mut routes = Vec::new();
    let mut seen = BTreeSet::new();
    collect(&props.items, &mut Vec::new(), &mut routes, &mut seen)?;
    Ok(Box::new(MenuModel {
        props,
        state: MenuState::default(),
        routes,
    }))
}

fn collect(
    items: &[MenuItem],
    labels: &mut Vec<String>,
    out: &mut Vec<Route>,
    seen: &mut BTreeSet<String>,
) -> Result<(), ComponentError> {
    for item in items {
        if !plain_id(&item.key) || !seen.insert(item.key.clone()) {
            return Err(ComponentError::malformed("items", format!("bad or duplicate key `{}`", item.key)));
        }
        labels.push(item.label().to_string());
        if item.children.is_empty() {
            if !item.disabled {
                out.push(Route {
                    route: item.key.clone(),
                    labels: labels.clone(),
                });
            }
        } else if !item.disabled {
            collect(&item.children, labels, out, seen)?;
        }
        labels.pop();
    }
    Ok(())
}

fn find<'a>(items: &'a [MenuItem], key: &str) -> Option<&'a MenuItem> {
    items
        .iter()
        .find_map(|i| if i.key == key { Some(i) } else { find(&i.children, key) })
}

impl MenuModel {
    fn render_items(&self, key: &str, items: &[MenuItem]) -> Vec<RenderedNode> {
        items
            .iter()
            .map(|item| {
                let node = RenderedNode::new(format!("{key}/item/{}", item.key), Role::MenuItem, item.label())
                    .value(item.key.clone())
                    .disabled(item.disabled);
                if item.children.is_empty() {
                    let node = node.selected(self.state.current.as_deref() == Some(item.key.as_str()));
                    if item.disabled {
                        node
                    } else {
                        node.option(item.key.clone())
                    }
                } else {
                    let open = self.state.open.contains(&item.key);
                    let node = node.expanded(open);
                    if open {
                        node.children(self.render_items(key, &item.children))
                    } else {
                        node
                    }
                }
            })
            .collect()
    }
}

impl WidgetModel for MenuModel {
    model_common!(Widget::Menu);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let routes: Vec<Value> = self
            .routes
            .iter()
            .map(|r| json!({"route": r.route, "label": r.labels.last(), "path": r.labels}))
            .collect();
        snapshot(&[to_value(&self.props), to_value(&self.state), json!({ "routes": routes })])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![ToolSignature::new("navigateTo", "Go directly to a route").param("target", ParamType::Enum, true)]
    }

    fn metadata(&self) -> InteractionMetadata {
        let routes = self.routes.iter().map(|r| r.route.clone());
        InteractionMetadata::default().with("navigateTo", "target", ParamContract::enumeration(strings(routes)))
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["navigateTo"]
    }

    fn handle(&mut self, key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        if tool != "navigateTo" {
            return Err(format!("no handler for `{tool}`"));
        }
        let target = params.get("target").and_then(Value::as_str).ok_or("target must be a string")?;
        if !self.routes.iter().any(|r| r.route == target) {
            return Err(format!("no route `{target}`"));
        }
        self.state.current = Some(target.to_string());
        Ok(vec![EnvEvent::new(key, EventKind::Navigate, Some(target.to_string()))])
    }

    fn render(&self, key: &str) -> RenderedNode {
        RenderedNode::new(key, Role::Menu, self.props.label.clone().unwrap_or_default())
            .children(self.render_items(key, &self.props.items))
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        match verb {
            AtomicVerb::Click => {}
            AtomicVerb::Type { .. } => return AtomicEffect::rejected("not editable"),
            _ => return AtomicEffect::neutral(),
        }
        let Some(item) = local.strip_prefix("item/").and_then(|k| find(&self.props.items, k)) else {
            return AtomicEffect::neutral();
        };
        if item.children.is_empty() {
            let route = item.key.clone();
            self.state.current = Some(route.clone());
            AtomicEffect::neutral().event(EnvEvent::new(key, EventKind::Navigate, Some(route)))
        } else if let Some(pos) = self.state.open.iter().position(|k| k == &item.key) {
            self.state.open.remove(pos);
            AtomicEffect::conceal()
        } else {
            self.state.open.push(item.key.clone());
            AtomicEffect::reveal()
        }
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let routes = status.get("routes")?.as_array()?;
    Some(string_set(routes.iter().map(|r| r.get("route"))))
}
