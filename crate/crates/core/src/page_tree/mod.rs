//! Page tree with component roots, and the hybrid view that swaps each component subtree
//! for its semantic description.

mod serialize;
mod som;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use serialize::{parse_hybrid, parse_raw, serialize_hybrid, serialize_raw, ParseError, HYBRID_HEADER};
pub use som::{serialize_som, som_annotate, SomControl, SomEntry, SomView};

use crate::component_model::{instantiate, ComponentError, ComponentKey, ComponentSpec, RenderedNode};
use crate::registry::{Registry, SemanticTriplet};

fn default_tag() -> String {
    "div".into()
}

/// One node of a page fixture: a layout element or a component entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FixtureNode {
    Component {
        component: ComponentSpec,
    },
    Structural {
        #[serde(default = "default_tag")]
        tag: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        interactive: bool,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        children: Vec<FixtureNode>,
    },
}

impl Default for FixtureNode {
    fn default() -> Self {
        FixtureNode::Structural {
            tag: default_tag(),
            id: None,
            label: None,
            interactive: false,
            children: Vec::new(),
        }
    }
}

impl FixtureNode {
    pub fn component_specs(&self) -> Vec<&ComponentSpec> {
        let mut out = Vec::new();
        self.collect_specs(&mut out);
        out
    }

    fn collect_specs<'a>(&'a self, out: &mut Vec<&'a ComponentSpec>) {
        match self {
            FixtureNode::Component { component } => out.push(component),
            FixtureNode::Structural { children, .. } => children.iter().for_each(|c| c.collect_specs(out)),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PageError {
    #[error("component key `{0}` is used more than once")]
    DuplicateKey(String),
    #[error("fixture parse error at line {line}, column {column}: {message}")]
    FixtureParse { line: usize, column: usize, message: String },
    #[error("component `{key}`: {source}")]
    Component {
        key: String,
        #[source]
        source: ComponentError,
    },
    #[error("`{0}` is not registered")]
    DanglingKey(String),
}

pub fn parse_fixture(text: &str) -> Result<FixtureNode, PageError> {
    serde_json::from_str(text).map_err(|e| PageError::FixtureParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralNode {
    pub id: String,
    pub tag: String,
    pub label: String,
    pub interactive: bool,
    pub children: Vec<PageNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PageNode {
    Structural(StructuralNode),
    /// A component root (`data-cid`) with its currently disclosed rendering.
    Component { cid: ComponentKey, rendered: RenderedNode },
}

impl PageNode {
    pub fn id(&self) -> &str {
        match self {
            PageNode::Structural(s) => &s.id,
            PageNode::Component { rendered, .. } => &rendered.id,
        }
    }
}

/// Immutable snapshot of the raw page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageTree {
    pub root: PageNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthStats {
    pub max_depth: usize,
    pub mean_leaf_depth: f64,
    pub node_count: usize,
}

/// Instantiates and mounts every component, then snapshots the page.
pub fn build_page(fixture: &FixtureNode, registry: &mut Registry) -> Result<PageTree, PageError> {
    let specs = fixture.component_specs();
    let mut keys = BTreeSet::new();
    for s in &specs {
        if !keys.insert(s.key.as_str()) || !registry.is_available(&s.key) {
            return Err(PageError::DuplicateKey(s.key.clone()));
        }
    }
    let instances = specs
        .iter()
        .map(|s| {
            instantiate(s).map_err(|source| PageError::Component {
                key: s.key.clone(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    for inst in instances {
        registry
            .register(inst)
            .map_err(|e| PageError::DuplicateKey(e.to_string()))?;
    }
    Ok(PageTree {
        root: layout(fixture, "n0", registry),
    })
}

fn layout(node: &FixtureNode, path: &str, registry: &Registry) -> PageNode {
    match node {
        FixtureNode::Component { component } => PageNode::Component {
            cid: component.key.clone(),
            rendered: registry
                .get(&component.key)
                .map(|i| i.render())
                .expect("mounted by build_page"),
        },
        FixtureNode::Structural {
            tag,
            id,
            label,
            interactive,
            children,
        } => PageNode::Structural(StructuralNode {
            id: id.clone().unwrap_or_else(|| path.to_string()),
            tag: tag.clone(),
            label: label.clone().unwrap_or_default(),
            interactive: *interactive,
            children: children
                .iter()
                .enumerate()
                .map(|(i, c)| layout(c, &format!("{path}.{i}"), registry))
                .collect(),
        }),
    }
}

impl PageTree {
    /// Re-renders component roots from the registry; unmounted keys keep their last rendering.
    pub fn refresh(&self, registry: &Registry) -> PageTree {
        fn go(node: &PageNode, registry: &Registry) -> PageNode {
            match node {
                PageNode::Structural(s) => PageNode::Structural(StructuralNode {
                    children: s.children.iter().map(|c| go(c, registry)).collect(),
                    ..s.clone()
                }),
                PageNode::Component { cid, rendered } => PageNode::Component {
                    cid: cid.clone(),
                    rendered: registry.get(cid).map(|i| i.render()).unwrap_or_else(|| rendered.clone()),
                },
            }
        }
        PageTree {
            root: go(&self.root, registry),
        }
    }

    /// Component keys in document order.
    pub fn component_keys(&self) -> Vec<ComponentKey> {
        fn go(node: &PageNode, out: &mut Vec<ComponentKey>) {
            match node {
                PageNode::Structural(s) => s.children.iter().for_each(|c| go(c, out)),
                PageNode::Component { cid, .. } => out.push(cid.clone()),
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    /// Structural nodes in document order.
    pub fn structural_nodes(&self) -> Vec<&StructuralNode> {
        fn go<'a>(node: &'a PageNode, out: &mut Vec<&'a StructuralNode>) {
            if let PageNode::Structural(s) = node {
                out.push(s);
                s.children.iter().for_each(|c| go(c, out));
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    pub fn rendered(&self, cid: &str) -> Option<&RenderedNode> {
        fn go<'a>(node: &'a PageNode, cid: &str) -> Option<&'a RenderedNode> {
            match node {
                PageNode::Structural(s) => s.children.iter().find_map(|c| go(c, cid)),
                PageNode::Component { cid: k, rendered } => (k == cid).then_some(rendered),
            }
        }
        go(&self.root, cid)
    }

    /// Unmounts every component this page mounted.
    pub fn teardown(&self, registry: &mut Registry) {
        for k in self.component_keys() {
            let _ = registry.unregister(&k);
        }
    }
}

pub fn depth_stats(tree: &PageTree) -> DepthStats {
    fn rendered(n: &RenderedNode, depth: usize, acc: &mut (usize, usize, usize, usize)) {
        acc.0 += 1;
        acc.1 = acc.1.max(depth);
        if n.children.is_empty() {
            acc.2 += 1;
            acc.3 += depth;
        }
        n.children.iter().for_each(|c| rendered(c, depth + 1, acc));
    }
    fn page(n: &PageNode, depth: usize, acc: &mut (usize, usize, usize, usize)) {
        match n {
            PageNode::Component { rendered: r, .. } => rendered(r, depth, acc),
            PageNode::Structural(s) => {
                acc.0 += 1;
                acc.1 = acc.1.max(depth);
                if s.children.is_empty() {
                    acc.2 += 1;
                    acc.3 += depth;
                }
                s.children.iter().for_each(|c| page(c, depth + 1, acc));
            }
        }
    }
    // (nodes, max depth, leaves, leaf depth sum)
    let mut acc = (0, 0, 0, 0);
    page(&tree.root, 1, &mut acc);
    DepthStats {
        max_depth: acc.1,
        mean_leaf_depth: acc.3 as f64 / acc.2.max(1) as f64,
        node_count: acc.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HybridNode {
    Structural {
        id: String,
        tag: String,
        label: String,
        interactive: bool,
        children: Vec<HybridNode>,
    },
    /// Stands in for a whole component subtree; never has children.
    Semantic { key: ComponentKey, triplet: SemanticTriplet },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridTree {
    pub root: HybridNode,
}

impl HybridTree {
    pub fn node_count(&self) -> usize {
        fn go(n: &HybridNode) -> usize {
            match n {
                HybridNode::Semantic { .. } => 1,
                HybridNode::Structural { children, .. } => 1 + children.iter().map(go).sum::<usize>(),
            }
        }
        go(&self.root)
    }

    pub fn triplets(&self) -> Vec<&SemanticTriplet> {
        fn go<'a>(n: &'a HybridNode, out: &mut Vec<&'a SemanticTriplet>) {
            match n {
                HybridNode::Semantic { triplet, .. } => out.push(triplet),
                HybridNode::Structural { children, .. } => children.iter().for_each(|c| go(c, out)),
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }
}

pub fn build_hybrid_view(tree: &PageTree, registry: &Registry) -> Result<HybridTree, PageError> {
    fn go(n: &PageNode, registry: &Registry) -> Result<HybridNode, PageError> {
        Ok(match n {
            PageNode::Component { cid, .. } => HybridNode::Semantic {
                key: cid.clone(),
                triplet: registry
                    .get_status(cid)
                    .map_err(|_| PageError::DanglingKey(cid.clone()))?,
            },
            PageNode::Structural(s) => HybridNode::Structural {
                id: s.id.clone(),
                tag: s.tag.clone(),
                label: s.label.clone(),
                interactive: s.interactive,
                children: s.children.iter().map(|c| go(c, registry)).collect::<Result<_, _>>()?,
            },
        })
    }
    Ok(HybridTree {
        root: go(&tree.root, registry)?,
    })
}

#[cfg(test)]
mod tests;
