use serde::{Deserialize, Serialize};

/// Accessibility-style role of a rendered node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Group,
    Combobox,
    Textbox,
    Listbox,
    Option,
    Button,
    Switch,
    Menu,
    MenuItem,
    TabList,
    Tab,
    Navigation,
    Heading,
    Grid,
    GridCell,
    Table,
    ColumnHeader,
    Row,
    Cell,
    Status,
    Form,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Group => "group",
            Role::Combobox => "combobox",
            Role::Textbox => "textbox",
            Role::Listbox => "listbox",
            Role::Option => "option",
            Role::Button => "button",
            Role::Switch => "switch",
            Role::Menu => "menu",
            Role::MenuItem => "menuitem",
            Role::TabList => "tablist",
            Role::Tab => "tab",
            Role::Navigation => "navigation",
            Role::Heading => "heading",
            Role::Grid => "grid",
            Role::GridCell => "gridcell",
            Role::Table => "table",
            Role::ColumnHeader => "columnheader",
            Role::Row => "row",
            Role::Cell => "cell",
            Role::Status => "status",
            Role::Form => "form",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        const ALL: [Role; 21] = [
            Role::Group,
            Role::Combobox,
            Role::Textbox,
            Role::Listbox,
            Role::Option,
            Role::Button,
            Role::Switch,
            Role::Menu,
            Role::MenuItem,
            Role::TabList,
            Role::Tab,
            Role::Navigation,
            Role::Heading,
            Role::Grid,
            Role::GridCell,
            Role::Table,
            Role::ColumnHeader,
            Role::Row,
            Role::Cell,
            Role::Status,
            Role::Form,
        ];
        ALL.into_iter().find(|r| r.as_str() == s)
    }
}

/// One node of a component's rendered (disclosed) subtree.
///
/// `option` marks nodes whose activation commits a candidate value; it mirrors the
/// candidate set exposed by the semantic view and is not printed in serialized views.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedNode {
    pub id: String,
    pub role: Role,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub option: Option<String>,
    #[serde(default)]
    pub disabled: bool,
    #[serde(default)]
    pub readonly: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expanded: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<bool>,
    #[serde(default)]
    pub scrollable: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<RenderedNode>,
}

impl RenderedNode {
    pub fn new(id: impl Into<String>, role: Role, label: impl Into<String>) -> Self {
        RenderedNode {
            id: id.into(),
            role,
            label: label.into(),
            name: None,
            value: None,
            option: None,
            disabled: false,
            readonly: false,
            expanded: None,
            selected: None,
            scrollable: false,
            children: Vec::new(),
        }
    }

    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn value(mut self, value: impl Into<String>) -> Self {
        self.value = Some(value.into());
        self
    }

    pub fn option(mut self, candidate: impl Into<String>) -> Self {
        self.option = Some(candidate.into());
        self
    }

    pub fn disabled(mut self, disabled: bool) -> Self {
        self.disabled = disabled;
        self
    }

    pub fn readonly(mut self, readonly: bool) -> Self {
        self.readonly = readonly;
        self
    }

    pub fn expanded(mut self, expanded: bool) -> Self {
        self.expanded = Some(expanded);
        self
    }

    pub fn selected(mut self, selected: bool) -> Self {
        self.selected = Some(selected);
        self
    }

    pub fn scrollable(mut self) -> Self {
        self.scrollable = true;
        self
    }

    pub fn child(mut self, node: RenderedNode) -> Self {
        self.children.push(node);
        self
    }

    pub fn children(mut self, nodes: impl IntoIterator<Item = RenderedNode>) -> Self {
        self.children.extend(nodes);
        self
    }

    /// Pre-order walk over this node and all descendants.
    pub fn walk(&self) -> Vec<&RenderedNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    pub fn find(&self, id: &str) -> Option<&RenderedNode> {
        self.walk().into_iter().find(|n| n.id == id)
    }

    pub fn count(&self) -> usize {
        1 + self.children.iter().map(RenderedNode::count).sum::<usize>()
    }
}
