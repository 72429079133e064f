use super::Widget;

/// Business fields the props listener forwards into the semantic state view, per widget.
/// Anything else (style, layout, disclosure bookkeeping) is dropped.
const WHITELIST: &[(Widget, &[&str])] = &[
    (Widget::Menu, &["label", "routes", "current"]),
    (Widget::Tabs, &["label", "tabs", "active"]),
    (Widget::Pagination, &["label", "total", "page_size", "pages", "current"]),
    (Widget::Input, &["label", "placeholder", "pattern", "value", "submitted"]),
    (Widget::InputNumber, &["label", "min", "max", "step", "value", "submitted"]),
    (Widget::Select, &["label", "placeholder", "options", "value", "submitted"]),
    (Widget::Cascader, &["label", "placeholder", "candidates", "value", "submitted"]),
    (
        Widget::DatePicker,
        &["label", "format", "min", "max", "disabled_dates", "value", "submitted"],
    ),
    (Widget::Switch, &["label", "value", "submitted"]),
    (Widget::Form, &["label", "fields", "values", "submitted", "errors"]),
    (Widget::Table, &["label", "columns", "rows", "row_key", "sort", "filter", "view"]),
];

pub fn whitelist(widget: Widget) -> &'static [&'static str] {
    WHITELIST
        .iter()
        .find(|(w, _)| *w == widget)
        .map(|(_, fields)| *fields)
        .unwrap_or(&[])
}
