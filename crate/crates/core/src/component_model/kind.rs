use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Role a component plays in agent decision-making.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Navigation,
    DataEntry,
    DataDisplay,
}

impl Category {
    /// Tool names every widget of this category exposes.
    pub fn tool_vocabulary(self) -> &'static [&'static str] {
        match self {
            Category::Navigation => &["navigateTo"],
            Category::DataEntry => &["setValue", "submit"],
            Category::DataDisplay => &["sort", "filter"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Navigation => "Navigation",
            Category::DataEntry => "DataEntry",
            Category::DataDisplay => "DataDisplay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Widget {
    Menu,
    Tabs,
    Pagination,
    Input,
    InputNumber,
    Select,
    Cascader,
    DatePicker,
    Switch,
    Form,
    Table,
}

impl Widget {
    pub const ALL: [Widget; 11] = [
        Widget::Menu,
        Widget::Tabs,
        Widget::Pagination,
        Widget::Input,
        Widget::InputNumber,
        Widget::Select,
        Widget::Cascader,
        Widget::DatePicker,
        Widget::Switch,
        Widget::Form,
        Widget::Table,
    ];

    pub fn category(self) -> Category {
        match self {
            Widget::Menu | Widget::Tabs | Widget::Pagination => Category::Navigation,
            Widget::Input
            | Widget::InputNumber
            | Widget::Select
            | Widget::Cascader
            | Widget::DatePicker
            | Widget::Switch
            | Widget::Form => Category::DataEntry,
            Widget::Table => Category::DataDisplay,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Widget::Menu => "Menu",
            Widget::Tabs => "Tabs",
            Widget::Pagination => "Pagination",
            Widget::Input => "Input",
            Widget::InputNumber => "InputNumber",
            Widget::Select => "Select",
            Widget::Cascader => "Cascader",
            Widget::DatePicker => "DatePicker",
            Widget::Switch => "Switch",
            Widget::Form => "Form",
            Widget::Table => "Table",
        }
    }
}

impl fmt::Display for Widget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Widget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Widget::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentKind {
    pub category: Category,
    pub widget: Widget,
}

impl From<Widget> for ComponentKind {
    fn from(widget: Widget) -> Self {
        ComponentKind {
            category: widget.category(),
            widget,
        }
    }
}
