use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::*;
use crate::testkit::{cascader, datepicker, samples, spec, table};

fn ids(node: &RenderedNode) -> BTreeSet<String> {
    node.walk().into_iter().map(|n| n.id.clone()).collect()
}

fn options(node: &RenderedNode) -> BTreeSet<String> {
    node.walk().into_iter().filter_map(|n| n.option.clone()).collect()
}

fn params(v: Value) -> Params {
    v.as_object().unwrap().clone()
}

fn quiet() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0)
}

/// Every click/scroll event that is currently possible on enabled nodes.
fn possible_events(inst: &ComponentInstance) -> Vec<AtomicEvent> {
    let root = inst.render();
    let mut out = Vec::new();
    for n in root.walk() {
        if n.disabled {
            continue;
        }
        if n.scrollable {
            out.push(AtomicEvent::scroll(n.id.clone(), ScrollDirection::Down));
        } else if n.id != inst.key() {
            out.push(AtomicEvent::click(n.id.clone()));
        }
    }
    out
}

/// Exhaustive click/scroll exploration; returns every option marker ever rendered.
fn explore(inst: &ComponentInstance, limit: usize) -> BTreeSet<String> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([inst.clone()]);
    let mut found = BTreeSet::new();
    seen.insert(inst.internal_state().to_string());
    while let Some(cur) = queue.pop_front() {
        found.extend(options(&cur.render()));
        for ev in possible_events(&cur) {
            let mut next = cur.clone();
            next.apply_atomic(&ev, 0.0, &mut quiet()).unwrap();
            if seen.insert(next.internal_state().to_string()) {
                assert!(seen.len() < limit, "state space too large");
                queue.push_back(next);
            }
        }
    }
    found
}

#[test]
fn cascader_starts_collapsed_and_empty() {
    let c = cascader();
    let state = c.internal_state();
    assert_eq!(state["value"], Value::Null);
    assert_eq!(state["open"], json!(false));
    assert_eq!(c.render().count(), 2);
}

#[test]
fn datepicker_metadata_carries_format_and_range() {
    let d = datepicker("2025-01-01", "2026-12-31");
    let c = d.metadata().param("setValue", "value").unwrap().clone();
    assert_eq!(c.schema.ty, Some(ParamType::Date));
    assert_eq!(c.runtime.date_format.as_deref(), Some("YYYY-MM-DD"));
    assert_eq!(c.runtime.min, Some(Limit::Date("2025-01-01".into())));
    assert_eq!(c.runtime.max, Some(Limit::Date("2026-12-31".into())));
}

#[test]
fn unknown_widget_is_rejected() {
    let err = instantiate(&spec("x", "Carousel3D", json!({}))).unwrap_err();
    assert_eq!(err, ComponentError::UnknownWidget("Carousel3D".into()));
}

#[test]
fn malformed_props_name_the_field() {
    let err = instantiate(&spec("d", "DatePicker", json!({"min": "2025-01-01"}))).unwrap_err();
    assert!(matches!(err, ComponentError::MalformedProps { ref field, .. } if field == "max"), "{err:?}");
    let err = instantiate(&spec("p", "Pagination", json!({"total": "many"}))).unwrap_err();
    assert!(matches!(err, ComponentError::MalformedProps { ref field, .. } if field == "total"), "{err:?}");
}

#[test]
fn collapsed_cascader_lists_every_leaf() {
    let view = cascader().semantic_state();
    assert_eq!(view.name, "cascader");
    let values = view.candidate_values().unwrap();
    assert!(values.contains("westlake"));
    assert_eq!(values.len(), 4);
    let first = &view.status["candidates"][0];
    assert_eq!(first["value"], "westlake");
}

#[test]
fn table_view_holds_all_rows_while_ten_render() {
    let t = table(100);
    let rendered = t.render().walk().iter().filter(|n| n.role == Role::Row && n.option.is_some()).count();
    assert_eq!(rendered, 10);
    let status = t.semantic_state().status;
    assert_eq!(status["rows"].as_array().unwrap().len(), 100);
    assert_eq!(status["columns"].as_array().unwrap().len(), 2);
    assert_eq!(status["view"].as_array().unwrap().len(), 100);
}

#[test]
fn whitelist_drops_style_props() {
    let status = table(3).semantic_state().status;
    assert!(status.get("width").is_none());
    assert!(status.get("loaded").is_none());
    for inst in samples() {
        let allowed = whitelist(inst.kind().widget);
        for field in inst.semantic_state().status.as_object().unwrap().keys() {
            assert!(allowed.contains(&field.as_str()), "{} leaks {field}", inst.key());
        }
    }
}

#[test]
fn signatures_follow_category_vocabulary() {
    let names = |i: &ComponentInstance| i.tool_signatures().into_iter().map(|s| s.name).collect::<Vec<_>>();
    let all = samples();
    let by_key = |k: &str| all.iter().find(|i| i.key() == k).unwrap();
    assert_eq!(names(by_key("menu")), ["navigateTo"]);
    assert_eq!(names(by_key("datepicker")), ["setValue", "submit"]);
    assert_eq!(names(by_key("table")), ["sort", "filter"]);
    let table_sig = &by_key("table").tool_signatures()[0];
    assert_eq!(table_sig.params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["column", "order"]);
    for inst in &all {
        let vocab = inst.kind().category.tool_vocabulary();
        for n in names(inst) {
            assert!(vocab.contains(&n.as_str()), "{n} outside vocabulary of {}", inst.key());
        }
        assert_eq!(inst.tool_signatures(), inst.tool_signatures());
    }
}

#[test]
fn every_param_has_a_contract() {
    for inst in samples() {
        let md = inst.metadata();
        for sig in inst.tool_signatures() {
            assert!(md.tools.contains_key(&sig.name), "{} lacks {}", inst.key(), sig.name);
            for p in &sig.params {
                let c = md.param(&sig.name, &p.name).unwrap_or_else(|| panic!("{}.{}", sig.name, p.name));
                assert_eq!(c.schema.ty, Some(p.ty));
            }
        }
    }
}

#[test]
fn select_and_number_metadata() {
    let s = instantiate(&spec("s", "Select", json!({"options": [{"value": "A"}, {"value": "B"}, {"value": "C"}]})))
        .unwrap();
    let c = s.metadata().param("setValue", "value").unwrap().clone();
    assert_eq!(c.schema.ty, Some(ParamType::Enum));
    assert_eq!(c.schema.enum_values, Some(vec![json!("A"), json!("B"), json!("C")]));

    let n = instantiate(&spec("n", "InputNumber", json!({"min": 0, "max": 10}))).unwrap();
    let c = n.metadata().param("setValue", "value").unwrap().clone();
    assert_eq!(c.schema.ty, Some(ParamType::Number));
    assert_eq!(c.runtime.min, Some(Limit::Number(0.0)));
    assert_eq!(c.runtime.max, Some(Limit::Number(10.0)));
}

#[test]
fn cascader_set_value_resolves_full_path() {
    let mut c = cascader();
    let r = c.dispatch_tool("setValue", &params(json!({"value": "westlake"}))).unwrap();
    assert_eq!(c.internal_state()["value"], json!(["zhejiang", "hangzhou", "westlake"]));
    assert!(!r.direct_mutation);
    assert_eq!(r.effect.changes[0].field, "value");
    c.dispatch_tool("setValue", &params(json!({"value": ["jiangsu", "nanjing", "zhonghuamen"]})))
        .unwrap();
    assert_eq!(c.internal_state()["value"][2], "zhonghuamen");
}

#[test]
fn datepicker_set_value() {
    let mut d = datepicker("2025-01-01", "2026-12-31");
    let r = d.dispatch_tool("setValue", &params(json!({"value": "2025-12-31"}))).unwrap();
    assert_eq!(r.state.status["value"], "2025-12-31");
}

#[test]
fn undeclared_tool_is_unknown() {
    let mut t = table(5);
    assert_eq!(
        t.dispatch_tool("paint", &Params::new()).unwrap_err(),
        DispatchError::UnknownTool("paint".into())
    );
}

#[test]
fn disabled_component_rejects_dispatch() {
    let mut c = cascader();
    c.set_disabled(true);
    assert_eq!(
        c.dispatch_tool("submit", &Params::new()).unwrap_err(),
        DispatchError::Disabled
    );
    assert!(c.render().walk().iter().all(|n| n.disabled));
}

#[test]
fn select_set_value_falls_back_to_direct_mutation() {
    let mut s = instantiate(&spec("s", "Select", json!({"options": [{"value": "A"}, {"value": "B"}]}))).unwrap();
    let r = s.dispatch_tool("setValue", &params(json!({"value": "B"}))).unwrap();
    assert!(r.direct_mutation);
    assert_eq!(s.internal_state()["value"], "B");
}

#[test]
fn custom_handler_takes_priority() {
    let mut s = instantiate(&spec("s", "Select", json!({"options": [{"value": "A"}, {"value": "B"}]}))).unwrap();
    s.set_handler(
        "setValue",
        Handler::Custom(std::sync::Arc::new(|state, p| {
            state.insert("value".into(), p["value"].clone());
            state.insert("submitted".into(), json!(true));
            Ok(())
        })),
    );
    let r = s.dispatch_tool("setValue", &params(json!({"value": "A"}))).unwrap();
    assert!(!r.direct_mutation);
    assert_eq!(s.internal_state()["submitted"], json!(true));
}

#[test]
fn failing_dispatch_is_atomic() {
    let mut f = samples().into_iter().find(|i| i.key() == "signup").unwrap();
    f.dispatch_tool("setValue", &params(json!({"user": "ann"}))).unwrap();
    let before = f.internal_state();
    // plan is required and missing
    let err = f.dispatch_tool("submit", &Params::new()).unwrap_err();
    assert!(matches!(err, DispatchError::HandlerFailure(_)));
    assert_eq!(f.internal_state(), before);
    // second param fails after the first was applied on the scratch copy
    let err = f
        .dispatch_tool("setValue", &params(json!({"age": 30, "plan": "gold"})))
        .unwrap_err();
    assert!(matches!(err, DispatchError::HandlerFailure(_)));
    assert_eq!(f.internal_state(), before);

    let mut s = instantiate(&spec("s", "Select", json!({"options": [{"value": "A"}]}))).unwrap();
    let before = s.internal_state();
    let err = s.dispatch_tool("setValue", &params(json!({"value": "A", "colour": 1}))).unwrap_err();
    assert!(matches!(err, DispatchError::HandlerFailure(_)));
    assert_eq!(s.internal_state(), before);
}

#[test]
fn cascader_click_reveals_one_level() {
    let mut c = cascader();
    c.apply_atomic(&AtomicEvent::click("cascader/trigger"), 0.0, &mut quiet()).unwrap();
    let r = c.apply_atomic(&AtomicEvent::click("cascader/opt/0"), 0.0, &mut quiet()).unwrap();
    assert_eq!(r.disclosure, Disclosure::Reveal);
    let tree = c.render();
    assert!(tree.find("cascader/col/1").is_some());
    assert!(tree.find("cascader/opt/0-0").is_some());
    assert!(tree.find("cascader/col/2").is_none());
    assert!(tree.find("cascader/opt/0-0-0").is_none());
}

#[test]
fn cascader_atomic_path_selects_leaf() {
    let mut c = cascader();
    for id in ["trigger", "opt/0", "opt/0-0", "opt/0-0-0"] {
        c.apply_atomic(&AtomicEvent::click(format!("cascader/{id}")), 0.0, &mut quiet()).unwrap();
    }
    assert_eq!(c.internal_state()["value"], json!(["zhejiang", "hangzhou", "westlake"]));
}

#[test]
fn datepicker_rejects_wrong_format() {
    let mut d = datepicker("2025-01-01", "2026-12-31");
    let before = d.internal_state();
    let r = d
        .apply_atomic(&AtomicEvent::type_text("datepicker/input", "2025/12/31"), 0.0, &mut quiet())
        .unwrap();
    assert!(r.rejected.is_some());
    assert!(!r.changed);
    assert_eq!(d.internal_state(), before);
    let r = d
        .apply_atomic(&AtomicEvent::type_text("datepicker/input", "2025-12-31"), 0.0, &mut quiet())
        .unwrap();
    assert!(r.rejected.is_none());
    assert_eq!(d.internal_state()["value"], "2025-12-31");
}

#[test]
fn datepicker_panel_pages_one_month_and_blocks_disabled_days() {
    let mut d = datepicker("2025-01-01", "2025-03-31");
    d.apply_atomic(&AtomicEvent::click("datepicker/input"), 0.0, &mut quiet()).unwrap();
    assert_eq!(d.render().find("datepicker/header").unwrap().value.as_deref(), Some("2025-01"));
    assert!(d.render().find("datepicker/prev").unwrap().disabled);
    let err = d
        .apply_atomic(&AtomicEvent::click("datepicker/day/2025-01-05"), 0.0, &mut quiet())
        .unwrap_err();
    assert_eq!(err, AtomicError::TargetDisabled("datepicker/day/2025-01-05".into()));
    d.apply_atomic(&AtomicEvent::click("datepicker/next"), 0.0, &mut quiet()).unwrap();
    assert_eq!(d.render().find("datepicker/header").unwrap().value.as_deref(), Some("2025-02"));
    assert!(d.render().find("datepicker/day/2025-01-10").is_none());
}

#[test]
fn table_scroll_loads_next_page() {
    let mut t = table(23);
    let r = t.apply_atomic(&AtomicEvent::scroll("table/body", ScrollDirection::Down), 0.0, &mut quiet()).unwrap();
    assert_eq!(r.disclosure, Disclosure::Reveal);
    assert_eq!(options(&t.render()).len(), 20);
}

#[test]
fn table_sort_and_filter_tools() {
    let mut t = table(30);
    t.dispatch_tool("sort", &params(json!({"column": "price", "order": "desc"}))).unwrap();
    let view = t.semantic_state().status["view"].clone();
    let rows = t.semantic_state().status["rows"].clone();
    let price = |k: &Value| {
        rows.as_array().unwrap().iter().find(|r| &r["id"] == k).unwrap()["price"].as_f64().unwrap()
    };
    let prices: Vec<f64> = view.as_array().unwrap().iter().map(price).collect();
    assert!(prices.windows(2).all(|w| w[0] >= w[1]));
    t.dispatch_tool("filter", &params(json!({"column": "name", "predicate": "~item 01"}))).unwrap();
    assert_eq!(t.semantic_state().status["view"].as_array().unwrap().len(), 10);
    t.dispatch_tool("filter", &params(json!({"column": "name", "predicate": ""}))).unwrap();
    assert_eq!(t.semantic_state().status["view"].as_array().unwrap().len(), 30);
}

#[test]
fn full_noise_swallows_events() {
    for inst in samples() {
        for ev in possible_events(&inst) {
            let mut i = inst.clone();
            let r = i.apply_atomic(&ev, 1.0, &mut quiet()).unwrap();
            assert!(!r.effective && !r.changed);
            assert_eq!(i.internal_state(), inst.internal_state());
        }
    }
}

#[test]
fn missing_target_is_reported() {
    let mut c = cascader();
    let err = c.apply_atomic(&AtomicEvent::click("cascader/opt/0"), 0.0, &mut quiet()).unwrap_err();
    assert_eq!(err, AtomicError::NoSuchTarget("cascader/opt/0".into()));
}

#[test]
fn atomic_disclosure_reaches_every_candidate() {
    for inst in samples() {
        let Some(expected) = inst.semantic_state().candidate_values() else {
            continue;
        };
        let found = explore(&inst, 50_000);
        assert_eq!(found, expected, "{}", inst.key());
    }
}

#[test]
fn menu_and_pagination_navigate() {
    let all = samples();
    let mut menu = all.iter().find(|i| i.key() == "menu").unwrap().clone();
    let r = menu.dispatch_tool("navigateTo", &params(json!({"target": "closed"}))).unwrap();
    assert_eq!(r.events[0].kind, EventKind::Navigate);
    assert_eq!(menu.internal_state()["current"], "closed");
    let mut pager = all.iter().find(|i| i.key() == "pager").unwrap().clone();
    pager.dispatch_tool("navigateTo", &params(json!({"target": 7}))).unwrap();
    assert_eq!(pager.internal_state()["current"], 7);
    assert!(pager.dispatch_tool("navigateTo", &params(json!({"target": 2.5}))).is_err());
    assert_eq!(pager.internal_state()["current"], 7);
}

#[test]
fn form_atomic_submit_reports_missing_fields() {
    let mut f = samples().into_iter().find(|i| i.key() == "signup").unwrap();
    let r = f.apply_atomic(&AtomicEvent::click("signup/submit"), 0.0, &mut quiet()).unwrap();
    assert_eq!(r.disclosure, Disclosure::Reveal);
    assert!(f.render().find("signup/status").unwrap().label.contains("required"));
    for ev in [
        AtomicEvent::type_text("signup/field/user", "ann"),
        AtomicEvent::click("signup/field/plan"),
        AtomicEvent::scroll("signup/list/plan", ScrollDirection::Down),
        AtomicEvent::click("signup/fopt/plan/2"),
    ] {
        f.apply_atomic(&ev, 0.0, &mut quiet()).unwrap();
    }
    let r = f.apply_atomic(&AtomicEvent::click("signup/submit"), 0.0, &mut quiet()).unwrap();
    assert_eq!(r.events.len(), 1);
    assert_eq!(f.internal_state()["values"]["plan"], "team");
    assert_eq!(f.internal_state()["submitted"], json!(true));
}

fn event_strategy() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..64, 0usize..64), 0..25)
}

/// Replays a random walk: each step picks a possible event, sometimes a type event.
fn walk(inst: &mut ComponentInstance, steps: &[(usize, usize)], mut check: impl FnMut(&RenderedNode, &AtomicResult, &RenderedNode)) {
    const PAYLOADS: [&str; 4] = ["2025-01-20", "abc", "2", "2025/01/20"];
    for &(a, b) in steps {
        let mut events = possible_events(inst);
        for n in inst.render().walk() {
            if matches!(n.role, Role::Textbox | Role::Combobox) && !n.disabled {
                events.push(AtomicEvent::type_text(n.id.clone(), PAYLOADS[b % PAYLOADS.len()]));
            }
        }
        if events.is_empty() {
            return;
        }
        let ev = &events[a % events.len()];
        let before = inst.render();
        let r = inst.apply_atomic(ev, 0.0, &mut quiet()).unwrap();
        check(&before, &r, &inst.render());
    }
}

proptest! {
    #[test]
    fn disclosure_matches_render_diff(which in 0usize..11, steps in event_strategy()) {
        let mut inst = samples().swap_remove(which);
        walk(&mut inst, &steps, |before, r, after| {
            let (old, new) = (ids(before), ids(after));
            let removed = old.difference(&new).count();
            let added = new.difference(&old).count();
            if removed > 0 {
                assert_eq!(r.disclosure, Disclosure::Conceal, "{} removed content", r.event);
            }
            match r.disclosure {
                Disclosure::Reveal => assert!(added > 0 && removed == 0, "{}", r.event),
                Disclosure::Conceal => assert!(removed > 0, "{}", r.event),
                Disclosure::None => assert_eq!(old, new, "{}", r.event),
            }
            if r.rejected.is_some() {
                assert!(!r.changed);
            }
        });
    }

    #[test]
    fn rendered_options_stay_within_candidates(which in 0usize..11, steps in event_strategy()) {
        let mut inst = samples().swap_remove(which);
        let candidates = inst.semantic_state().candidate_values();
        walk(&mut inst, &steps, |_, _, after| {
            if let Some(c) = &candidates {
                assert!(options(after).is_subset(c));
            }
        });
    }

    #[test]
    fn identical_sequences_are_deterministic(which in 0usize..11, steps in event_strategy()) {
        let mut a = samples().swap_remove(which);
        let mut b = samples().swap_remove(which);
        walk(&mut a, &steps, |_, _, _| {});
        walk(&mut b, &steps, |_, _, _| {});
        prop_assert_eq!(a.internal_state(), b.internal_state());
        prop_assert_eq!(a.semantic_state(), b.semantic_state());
    }

    #[test]
    fn noise_probability_is_respected(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = instantiate(&spec("n", "Switch", json!({}))).unwrap();
        let hits = (0..400)
            .filter(|_| s.apply_atomic(&AtomicEvent::click("n/switch"), 0.25, &mut rng).unwrap().effective)
            .count();
        // 400 draws at p = 0.75: mean 300, sd ~8.7
        prop_assert!((250..=350).contains(&hits), "{hits}");
    }
}
