//! Shared sample components for unit tests.

use serde_json::{json, Value};

use crate::component_model::{instantiate, ComponentInstance, ComponentSpec};

pub fn spec(key: &str, widget: &str, props: Value) -> ComponentSpec {
    ComponentSpec {
        key: key.into(),
        widget: widget.into(),
        props,
        disabled: false,
    }
}

pub fn cascader() -> ComponentInstance {
    instantiate(&cascader_spec()).unwrap()
}

pub fn cascader_spec() -> ComponentSpec {
    spec(
        "cascader",
        "Cascader",
        json!({
            "label": "Region",
            "options": [
                {"value": "zhejiang", "label": "Zhejiang", "children": [
                    {"value": "hangzhou", "label": "Hangzhou", "children": [
                        {"value": "westlake", "label": "West Lake"},
                        {"value": "xihu", "label": "Xihu"}
                    ]},
                    {"value": "ningbo", "label": "Ningbo", "children": [
                        {"value": "haishu", "label": "Haishu"}
                    ]}
                ]},
                {"value": "jiangsu", "label": "Jiangsu", "children": [
                    {"value": "nanjing", "label": "Nanjing", "children": [
                        {"value": "zhonghuamen", "label": "Zhong Hua Men"}
                    ]}
                ]}
            ]
        }),
    )
}

pub fn datepicker(min: &str, max: &str) -> ComponentInstance {
    instantiate(&datepicker_spec(min, max)).unwrap()
}

pub fn datepicker_spec(min: &str, max: &str) -> ComponentSpec {
    spec(
        "datepicker",
        "DatePicker",
        json!({"format": "YYYY-MM-DD", "min": min, "max": max, "input_read_only": false,
               "disabled_dates": ["2025-01-05"]}),
    )
}

pub fn table(n: usize) -> ComponentInstance {
    instantiate(&table_spec(n)).unwrap()
}

pub fn table_spec(n: usize) -> ComponentSpec {
    let rows: Vec<Value> = (0..n)
        .map(|i| json!({"id": format!("r{i}"), "name": format!("item {i:03}"), "price": (i * 7) % 50}))
        .collect();
    spec(
        "table",
        "Table",
        json!({
            "columns": [
                {"key": "name", "title": "Name", "sortable": true, "filterable": true},
                {"key": "price", "title": "Price", "sortable": true}
            ],
            "rows": rows,
            "page_size": 10,
            "width": 400
        }),
    )
}

pub fn samples() -> Vec<ComponentInstance> {
    sample_specs().iter().map(|s| instantiate(s).unwrap()).collect()
}

pub fn sample_specs() -> Vec<ComponentSpec> {
    vec![
        cascader_spec(),
        datepicker_spec("2025-01-01", "2025-02-10"),
        table_spec(23),
        spec(
            "menu",
            "Menu",
            json!({"items": [
                {"key": "home", "label": "Home"},
                {"key": "orders", "label": "Orders", "children": [
                    {"key": "open", "label": "Open"}, {"key": "closed", "label": "Closed"}
                ]}
            ]}),
        ),
        spec(
            "tabs",
            "Tabs",
            json!({"items": [{"key": "a"}, {"key": "b"}, {"key": "c", "disabled": true}]}),
        ),
        spec("pager", "Pagination", json!({"total": 95, "page_size": 10})),
        spec("search", "Input", json!({"placeholder": "Search", "search": true})),
        spec("qty", "InputNumber", json!({"min": 0, "max": 3})),
        spec(
            "color",
            "Select",
            json!({"options": [{"value": "red"}, {"value": "green"}, {"value": "blue", "disabled": true},
                               {"value": "black"}], "list_height": 2}),
        ),
        spec("notify", "Switch", json!({})),
        spec(
            "signup",
            "Form",
            json!({"list_height": 2, "fields": [
                {"name": "user", "kind": "text", "required": true},
                {"name": "age", "kind": "number", "min": 18, "max": 99},
                {"name": "plan", "kind": "select", "required": true,
                 "options": [{"value": "free"}, {"value": "pro"}, {"value": "team"}]}
            ]}),
        ),
    ]
}


/// The bundled task corpus, loaded once per test binary.
pub fn corpus() -> &'static [crate::benchmark::TaskSpec] {
    static SUITE: std::sync::OnceLock<Vec<crate::benchmark::TaskSpec>> = std::sync::OnceLock::new();
    SUITE.get_or_init(|| {
        crate::benchmark::load_suite(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))).unwrap()
    })
}

pub fn task(id: &str) -> &'static crate::benchmark::TaskSpec {
    corpus().iter().find(|t| t.id == id).unwrap_or_else(|| panic!("no task {id}"))
}

/// Plan memo shared by every test in the binary so each search runs once.
pub fn plans() -> crate::agent::PlanCache {
    static PLANS: std::sync::OnceLock<crate::agent::PlanCache> = std::sync::OnceLock::new();
    PLANS.get_or_init(Default::default).clone()
}
