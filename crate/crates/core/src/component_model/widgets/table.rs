//! Data table with sortable/filterable columns and a lazily loaded body.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{cell_text, disclosure_between, parse_props, plain_id, snapshot, strings, to_value};
use crate::component_model::{
    AtomicEffect, AtomicVerb, ComponentError, EnvEvent, InteractionMetadata, ParamContract, ParamType, Params,
    RenderedNode, Role, ScrollDirection, ToolSignature, Widget, WidgetModel,
};

/// Optional comparison operator followed by an operand; empty clears the filter.
pub const PREDICATE_PATTERN: &str = r"^((!=|>=|<=|=|>|<|~)?.+)?$";

const OPERATORS: [&str; 7] = ["!=", ">=", "<=", "=", ">", "<", "~"];

fn default_row_key() -> String {
    "id".into()
}

fn default_page_size() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Column {
    key: String,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    sortable: bool,
    #[serde(default)]
    filterable: bool,
}

impl Column {
    fn title(&self) -> &str {
        self.title.as_deref().unwrap_or(&self.key)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableProps {
    #[serde(default)]
    label: Option<String>,
    columns: Vec<Column>,
    rows: Vec<Map<String, Value>>,
    #[serde(default = "default_row_key")]
    row_key: String,
    #[serde(default = "default_page_size")]
    page_size: usize,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SortSpec {
    column: String,
    order: SortOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FilterSpec {
    column: String,
    predicate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableState {
    sort: Option<SortSpec>,
    filter: Option<FilterSpec>,
    loaded: usize,
    filter_open: Option<String>,
}

#[derive(Debug, Clone)]
pub(super) struct TableModel {
    props: TableProps,
    state: TableState,
    keys: Vec<String>,
}

pub(super) fn build(props: &Value) -> Result<Box<dyn WidgetModel>, ComponentError> {
    let props: TableProps = parse_props(props)?;
    if props.columns.is_empty() {
        return Err(ComponentError::malformed("columns", "must not be empty"));
    }
    if props.page_size == 0 {
        return Err(ComponentError::malformed("page_size", "must be positive"));
    }
    let cols: BTreeSet<&str> = props.columns.iter().map(|c| c.key.as_str()).collect();
    if cols.len() != props.columns.len() || !props.columns.iter().all(|c| plain_id(&c.key)) {
        return Err(ComponentError::malformed("columns", "column keys must be unique plain ids"));
    }
    let mut keys = Vec::with_capacity(props.rows.len());
    let mut seen = BTreeSet::new();
    for (i, row) in props.rows.iter().enumerate() {
        let k = row
            .get(&props.row_key)
            .map(cell_text)
            .ok_or_else(|| ComponentError::malformed("rows", format!("row {i} lacks `{}`", props.row_key)))?;
        if !plain_id(&k) || !seen.insert(k.clone()) {
            return Err(ComponentError::malformed("rows", format!("bad or duplicate row key `{k}`")));
        }
        keys.push(k);
    }
    let state = TableState {
        sort: None,
        filter: None,
        loaded: props.page_size,
        filter_open: None,
    };
    Ok(Box::new(TableModel { props, state, keys }))
}

/// Splits a predicate into operator and operand; a bare operand means equality.
pub fn parse_predicate(predicate: &str) -> Option<(&'static str, &str)> {
    if predicate.is_empty() {
        return None;
    }
    for op in OPERATORS {
        if let Some(rest) = predicate.strip_prefix(op) {
            if !rest.is_empty() {
                return Some((op, rest));
            }
        }
    }
    Some(("=", predicate))
}

/// Numeric comparison when both sides are numbers, text comparison otherwise.
pub fn compare_cells(a: &str, b: &str) -> Ordering {
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        _ => a.cmp(b),
    }
}

pub fn matches(cell: &str, op: &str, operand: &str) -> bool {
    let ord = compare_cells(cell, operand);
    match op {
        "=" => ord == Ordering::Equal,
        "!=" => ord != Ordering::Equal,
        ">" => ord == Ordering::Greater,
        "<" => ord == Ordering::Less,
        ">=" => ord != Ordering::Less,
        "<=" => ord != Ordering::Greater,
        "~" => cell.to_lowercase().contains(&operand.to_lowercase()),
        _ => false,
    }
}

impl TableModel {
    fn column(&self, key: &str) -> Option<&Column> {
        self.props.columns.iter().find(|c| c.key == key)
    }

    fn cell(&self, row: usize, column: &str) -> String {
        self.props.rows[row].get(column).map(cell_text).unwrap_or_default()
    }

    /// Row indices after filtering and a stable sort.
    fn view(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.props.rows.len()).collect();
        if let Some(f) = &self.state.filter {
            if let Some((op, operand)) = parse_predicate(&f.predicate) {
                idx.retain(|&i| matches(&self.cell(i, &f.column), op, operand));
            }
        }
        if let Some(s) = &self.state.sort {
            idx.sort_by(|&a, &b| {
                let ord = compare_cells(&self.cell(a, &s.column), &self.cell(b, &s.column));
                if s.order == SortOrder::Desc {
                    ord.reverse()
                } else {
                    ord
                }
            });
        }
        idx
    }

    fn distinct(&self, column: &str) -> Vec<String> {
        let mut vals: Vec<String> = (0..self.props.rows.len())
            .map(|i| self.cell(i, column))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        vals.sort_by(|a, b| compare_cells(a, b));
        vals
    }

    fn set_sort(&mut self, column: &str, order: Option<SortOrder>) {
        self.state.sort = order.map(|order| SortSpec {
            column: column.to_string(),
            order,
        });
        self.state.loaded = self.props.page_size;
    }

    fn set_filter(&mut self, column: &str, predicate: &str) {
        self.state.filter = (!predicate.is_empty()).then(|| FilterSpec {
            column: column.to_string(),
            predicate: predicate.to_string(),
        });
        self.state.loaded = self.props.page_size;
        self.state.filter_open = None;
    }

    fn order_of(&self, column: &str) -> &'static str {
        match &self.state.sort {
            Some(s) if s.column == column => match s.order {
                SortOrder::Asc => "asc",
                SortOrder::Desc => "desc",
            },
            _ => "none",
        }
    }
}

impl WidgetModel for TableModel {
    model_common!(Widget::Table);

    fn listener_snapshot(&self) -> Map<String, Value> {
        let view: Vec<&str> = self.view().into_iter().map(|i| self.keys[i].as_str()).collect();
        snapshot(&[to_value(&self.props), to_value(&self.state), json!({ "view": view })])
    }

    fn signatures(&self) -> Vec<ToolSignature> {
        vec![
            ToolSignature::new("sort", "Sort rows by a column; order none clears sorting")
                .param("column", ParamType::Enum, true)
                .param("order", ParamType::Enum, true),
            ToolSignature::new("filter", "Keep rows whose column satisfies the predicate; empty clears")
                .param("column", ParamType::Enum, true)
                .param("predicate", ParamType::String, true),
        ]
    }

    fn metadata(&self) -> InteractionMetadata {
        let sortable = self.props.columns.iter().filter(|c| c.sortable).map(|c| c.key.clone());
        let filterable = self.props.columns.iter().filter(|c| c.filterable).map(|c| c.key.clone());
        InteractionMetadata::default()
            .with("sort", "column", ParamContract::enumeration(strings(sortable)))
            .with(
                "sort",
                "order",
                ParamContract::enumeration(strings(["asc", "desc", "none"].map(String::from))),
            )
            .with("filter", "column", ParamContract::enumeration(strings(filterable)))
            .with(
                "filter",
                "predicate",
                ParamContract::of(ParamType::String).pattern(Some(PREDICATE_PATTERN.to_string())),
            )
    }

    fn handled_tools(&self) -> &'static [&'static str] {
        &["sort", "filter"]
    }

    fn handle(&mut self, _key: &str, tool: &str, params: &Params) -> Result<Vec<EnvEvent>, String> {
        let column = params.get("column").and_then(Value::as_str).ok_or("column must be a string")?;
        let col = self.column(column).ok_or_else(|| format!("no column `{column}`"))?;
        match tool {
            "sort" => {
                if !col.sortable {
                    return Err(format!("`{column}` is not sortable"));
                }
                let order = match params.get("order").and_then(Value::as_str) {
                    Some("asc") => Some(SortOrder::Asc),
                    Some("desc") => Some(SortOrder::Desc),
                    Some("none") => None,
                    other => return Err(format!("bad order {other:?}")),
                };
                self.set_sort(column, order);
            }
            "filter" => {
                if !col.filterable {
                    return Err(format!("`{column}` is not filterable"));
                }
                let predicate = params.get("predicate").and_then(Value::as_str).ok_or("predicate must be text")?;
                self.set_filter(column, predicate);
            }
            other => return Err(format!("no handler for `{other}`")),
        }
        Ok(Vec::new())
    }

    fn render(&self, key: &str) -> RenderedNode {
        let mut header = RenderedNode::new(format!("{key}/header"), Role::Row, "Header");
        for c in &self.props.columns {
            header = header.child(
                RenderedNode::new(format!("{key}/col/{}", c.key), Role::ColumnHeader, c.title())
                    .name(c.key.clone())
                    .value(self.order_of(&c.key)),
            );
            if !c.filterable {
                continue;
            }
            let open = self.state.filter_open.as_deref() == Some(c.key.as_str());
            header = header.child(
                RenderedNode::new(format!("{key}/filter/{}", c.key), Role::Button, format!("Filter {}", c.title()))
                    .expanded(open),
            );
            if open {
                let active = self.state.filter.as_ref().filter(|f| f.column == c.key);
                let mut list = RenderedNode::new(format!("{key}/flist/{}", c.key), Role::Listbox, c.title());
                for (i, v) in self.distinct(&c.key).into_iter().enumerate() {
                    let selected = active.is_some_and(|f| f.predicate == format!("={v}"));
                    list = list.child(
                        RenderedNode::new(format!("{key}/fopt/{}/{i}", c.key), Role::Option, v.clone())
                            .value(v)
                            .selected(selected),
                    );
                }
                if active.is_some() {
                    list = list.child(RenderedNode::new(
                        format!("{key}/fclear/{}", c.key),
                        Role::Button,
                        "Clear filter",
                    ));
                }
                header = header.child(list);
            }
        }
        let view = self.view();
        let shown = self.state.loaded.min(view.len());
        let rows = view[..shown].iter().map(|&i| {
            let rk = &self.keys[i];
            let cells = self.props.columns.iter().map(|c| {
                RenderedNode::new(format!("{key}/cell/{rk}/{}", c.key), Role::Cell, self.cell(i, &c.key))
            });
            RenderedNode::new(format!("{key}/row/{rk}"), Role::Row, rk.clone())
                .option(rk.clone())
                .children(cells)
        });
        let mut root = RenderedNode::new(key, Role::Table, self.props.label.clone().unwrap_or_default())
            .child(header)
            .child(RenderedNode::new(format!("{key}/body"), Role::Grid, "Rows").scrollable().children(rows));
        if shown < view.len() {
            root = root.child(RenderedNode::new(
                format!("{key}/more"),
                Role::Status,
                format!("Showing {shown} of {}", view.len()),
            ));
        }
        root
    }

    fn apply(&mut self, key: &str, local: &str, verb: &AtomicVerb) -> AtomicEffect {
        let before = self.render(key);
        let parts: Vec<&str> = local.split('/').collect();
        match (verb, parts.as_slice()) {
            (AtomicVerb::Type { .. }, _) => return AtomicEffect::rejected("not editable"),
            (AtomicVerb::Click, ["col", c]) => {
                if !self.column(c).is_some_and(|col| col.sortable) {
                    return AtomicEffect::neutral();
                }
                let next = match self.order_of(c) {
                    "none" => Some(SortOrder::Asc),
                    "asc" => Some(SortOrder::Desc),
                    _ => None,
                };
                self.set_sort(c, next);
            }
            (AtomicVerb::Click, ["filter", c]) => {
                self.state.filter_open = if self.state.filter_open.as_deref() == Some(*c) {
                    None
                } else {
                    Some(c.to_string())
                };
            }
            (AtomicVerb::Click, ["fopt", c, i]) => {
                let Some(v) = i.parse::<usize>().ok().and_then(|i| self.distinct(c).get(i).cloned()) else {
                    return AtomicEffect::neutral();
                };
                self.set_filter(c, &format!("={v}"));
            }
            (AtomicVerb::Click, ["fclear", c]) => self.set_filter(c, ""),
            (AtomicVerb::Scroll { direction: ScrollDirection::Down }, ["body"]) => {
                if self.state.loaded < self.view().len() {
                    self.state.loaded += self.props.page_size;
                }
            }
            _ => return AtomicEffect::neutral(),
        }
        disclosure_between(&before, &self.render(key))
    }
}

pub(super) fn candidates(status: &Value) -> Option<BTreeSet<String>> {
    let row_key = status.get("row_key")?.as_str()?;
    let rows = status.get("rows")?.as_array()?;
    Some(rows.iter().filter_map(|r| r.get(row_key)).map(cell_text).collect())
}
