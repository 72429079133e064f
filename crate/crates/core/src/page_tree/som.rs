//! Set-of-marks surrogate: numbered interactive elements in document order.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{PageNode, PageTree};
use crate::component_model::{ComponentKey, RenderedNode, Role};
use crate::registry::{Registry, SemanticTriplet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomControl {
    pub id: String,
    pub role: Role,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub disabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomEntry {
    pub mark: usize,
    pub id: String,
    /// Tag for layout elements, role for component roots.
    pub kind: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<ComponentKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triplet: Option<SemanticTriplet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<SomControl>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SomView {
    pub entries: Vec<SomEntry>,
}

fn actionable(n: &RenderedNode) -> bool {
    n.scrollable
        || n.option.is_some()
        || matches!(
            n.role,
            Role::Button
                | Role::Combobox
                | Role::Textbox
                | Role::Option
                | Role::Switch
                | Role::MenuItem
                | Role::Tab
                | Role::ColumnHeader
        )
}

fn controls(n: &RenderedNode, out: &mut Vec<SomControl>) {
    for c in &n.children {
        if actionable(c) {
            out.push(SomControl {
                id: c.id.clone(),
                role: c.role,
                label: c.label.clone(),
                value: c.value.clone(),
                disabled: c.disabled,
            });
        }
        controls(c, out);
    }
}

/// Marks every component root and every layout element flagged interactive.
/// Component entries carry the triplet when the key is mounted.
pub fn som_annotate(tree: &PageTree, registry: &Registry) -> SomView {
    fn go(n: &PageNode, registry: &Registry, out: &mut Vec<SomEntry>) {
        match n {
            PageNode::Structural(s) => {
                if s.interactive {
                    out.push(SomEntry {
                        mark: out.len() + 1,
                        id: s.id.clone(),
                        kind: s.tag.clone(),
                        label: s.label.clone(),
                        component: None,
                        triplet: None,
                        controls: Vec::new(),
                    });
                }
                s.children.iter().for_each(|c| go(c, registry, out));
            }
            PageNode::Component { cid, rendered } => {
                let mut cs = Vec::new();
                controls(rendered, &mut cs);
                out.push(SomEntry {
                    mark: out.len() + 1,
                    id: rendered.id.clone(),
                    kind: rendered.role.as_str().to_string(),
                    label: rendered.label.clone(),
                    component: Some(cid.clone()),
                    triplet: registry.get_status(cid).ok(),
                    controls: cs,
                });
            }
        }
    }
    let mut entries = Vec::new();
    go(&tree.root, registry, &mut entries);
    SomView { entries }
}

pub fn serialize_som(view: &SomView) -> String {
    let q = |s: &str| serde_json::to_string(s).expect("strings always encode");
    let mut out = String::new();
    for e in &view.entries {
        let _ = write!(out, "[{}] <{}> {} {}", e.mark, e.kind, e.id, q(&e.label));
        if let Some(c) = &e.component {
            let _ = write!(out, " component={c}");
        }
        out.push('\n');
        if let Some(t) = &e.triplet {
            let _ = writeln!(out, "    kind = {}/{}", t.state.kind.category.as_str(), t.state.kind.widget);
            for (tag, body) in [
                ("S", serde_json::to_string(&t.state.status)),
                ("T", serde_json::to_string(&t.signatures)),
                ("M", serde_json::to_string(&t.metadata)),
            ] {
                let _ = writeln!(out, "    {tag} = {}", body.expect("triplets always encode"));
            }
        }
        for c in &e.controls {
            let _ = write!(out, "    - [{}] {} {}", c.role.as_str(), c.id, q(&c.label));
            if let Some(v) = &c.value {
                let _ = write!(out, " value={}", q(v));
            }
            if c.disabled {
                out.push_str(" disabled");
            }
            out.push('\n');
        }
    }
    out
}
