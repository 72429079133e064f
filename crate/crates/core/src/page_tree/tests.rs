use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::*;
use crate::component_model::{AtomicEvent, Disclosure, ScrollDirection};
use crate::registry::REGISTRY_NAME;
use crate::testkit::{cascader_spec, sample_specs};

fn fixture() -> FixtureNode {
    let components: Vec<FixtureNode> = sample_specs()
        .into_iter()
        .map(|component| FixtureNode::Component { component })
        .collect();
    let (head, tail) = components.split_at(4);
    serde_json::from_value(json!({
        "tag": "main", "id": "app", "children": [
            {"tag": "nav", "label": "Top bar", "children": [
                {"tag": "a", "id": "logo", "label": "Shop", "interactive": true}
            ]},
            {"tag": "section", "children": head},
            {"tag": "aside", "children": [{"tag": "section", "children": tail}]},
            {"tag": "footer", "label": "© shop"}
        ]
    }))
    .unwrap()
}

fn page() -> (PageTree, Registry) {
    let mut r = Registry::new();
    let t = build_page(&fixture(), &mut r).unwrap();
    (t, r)
}

#[test]
fn empty_fixture_is_a_single_root() {
    let mut r = Registry::new();
    let f = parse_fixture("{}").unwrap();
    let t = build_page(&f, &mut r).unwrap();
    assert_eq!(serialize_raw(&t), "<div> n0 \"\"\n");
    let h = build_hybrid_view(&t, &r).unwrap();
    assert_eq!(h.node_count(), 1);
    assert_eq!(
        serialize_hybrid(&h),
        format!("{HYBRID_HEADER} {REGISTRY_NAME}\n<div> n0 \"\"\n")
    );
    assert!(som_annotate(&t, &r).entries.is_empty());
    assert_eq!(
        depth_stats(&t),
        DepthStats {
            max_depth: 1,
            mean_leaf_depth: 1.0,
            node_count: 1
        }
    );
}

#[test]
fn structural_only_page_matches_raw_modulo_header() {
    let mut r = Registry::new();
    let f = parse_fixture(r#"{"tag": "body", "children": [{"tag": "p", "label": "hi \"there\""}, {}]}"#).unwrap();
    let t = build_page(&f, &mut r).unwrap();
    let raw = serialize_raw(&t);
    let hybrid = serialize_hybrid(&build_hybrid_view(&t, &r).unwrap());
    assert_eq!(hybrid.split_once('\n').unwrap().1, raw);
    assert!(raw.contains("  <p> n0.0 \"hi \\\"there\\\"\"\n"));
}

#[test]
fn fixture_errors_carry_position() {
    match parse_fixture("{\n  \"tag\": \"div\",\n  \"children\": [\n}") {
        Err(PageError::FixtureParse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_fixture(r#"{"tga": "div"}"#), Err(PageError::FixtureParse { .. })));
}

#[test]
fn duplicate_keys_leave_registry_untouched() {
    let mut r = Registry::new();
    let dup = FixtureNode::Structural {
        tag: "div".into(),
        id: None,
        label: None,
        interactive: false,
        children: vec![
            FixtureNode::Component {
                component: cascader_spec(),
            },
            FixtureNode::Component {
                component: cascader_spec(),
            },
        ],
    };
    assert!(matches!(build_page(&dup, &mut r), Err(PageError::DuplicateKey(k)) if k == "cascader"));
    assert!(r.is_empty());

    let mut bad = sample_specs();
    bad[3].props = json!({"items": "nope"});
    let f = FixtureNode::Structural {
        tag: "div".into(),
        id: None,
        label: None,
        interactive: false,
        children: bad.into_iter().map(|component| FixtureNode::Component { component }).collect(),
    };
    assert!(matches!(build_page(&f, &mut r), Err(PageError::Component { key, .. }) if key == "menu"));
    assert!(r.is_empty());
}

#[test]
fn hybrid_replaces_each_component_and_keeps_layout() {
    let (t, r) = page();
    let h = build_hybrid_view(&t, &r).unwrap();
    let keys: Vec<_> = sample_specs().into_iter().map(|s| s.key).collect();
    assert_eq!(t.component_keys(), keys);
    let triplets = h.triplets();
    assert_eq!(triplets.len(), keys.len());
    for (tr, k) in triplets.iter().zip(&keys) {
        assert_eq!(**tr, r.get_status(k).unwrap());
    }
    assert_eq!(h.node_count(), t.structural_nodes().len() + keys.len());

    // layout lines appear verbatim and in order in both encodings
    let layout = |text: &str| -> Vec<String> {
        text.lines().filter(|l| l.trim_start().starts_with('<')).map(str::to_string).collect()
    };
    assert_eq!(layout(&serialize_raw(&t)), layout(&serialize_hybrid(&h)));
    assert_eq!(layout(&serialize_raw(&t)).len(), t.structural_nodes().len());

    assert!(depth_stats(&t).node_count > h.node_count());
}

#[test]
fn raw_and_hybrid_round_trip() {
    let (t, r) = page();
    let raw = serialize_raw(&t);
    let back = parse_raw(&raw).unwrap();
    assert_eq!(serialize_raw(&back), raw);
    assert_eq!(back.component_keys(), t.component_keys());

    let h = build_hybrid_view(&t, &r).unwrap();
    let text = serialize_hybrid(&h);
    assert_eq!(parse_hybrid(&text).unwrap(), h);

    assert!(parse_raw("  <div> x \"\"").is_err());
    assert!(parse_raw("<div> x \"\"\n<div> y \"\"").is_err());
    assert!(parse_hybrid("<div> x \"\"").is_err());
}

#[test]
fn dangling_keys_are_reported() {
    let (t, mut r) = page();
    r.unregister("qty").unwrap();
    assert!(matches!(build_hybrid_view(&t, &r), Err(PageError::DanglingKey(k)) if k == "qty"));
    // the stale rendering survives a refresh
    assert_eq!(t.refresh(&r).rendered("qty"), t.rendered("qty"));
}

#[test]
fn teardown_unmounts_everything() {
    let (t, mut r) = page();
    t.teardown(&mut r);
    assert!(r.is_empty());
}

#[test]
fn som_marks_components_and_interactive_layout() {
    let (t, r) = page();
    let v = som_annotate(&t, &r);
    assert_eq!(v.entries.len(), 1 + sample_specs().len());
    assert_eq!(v.entries[0].id, "logo");
    assert!(v.entries.iter().enumerate().all(|(i, e)| e.mark == i + 1));
    let cas = v.entries.iter().find(|e| e.component.as_deref() == Some("cascader")).unwrap();
    assert!(cas.triplet.is_some());
    assert!(!cas.controls.is_empty());
    let text = serialize_som(&v);
    assert!(text.starts_with("[1] <a> logo \"Shop\"\n"));
    assert!(text.contains("component=cascader"));
}

/// Clicks and scrolls on every enabled node of every component.
fn page_events(t: &PageTree) -> Vec<(String, AtomicEvent)> {
    let mut out = Vec::new();
    for k in t.component_keys() {
        for n in t.rendered(&k).unwrap().walk() {
            if n.disabled || n.id == k {
                continue;
            }
            out.push((
                k.clone(),
                if n.scrollable {
                    AtomicEvent::scroll(n.id.clone(), ScrollDirection::Down)
                } else {
                    AtomicEvent::click(n.id.clone())
                },
            ));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hybrid_size_is_invariant_under_disclosure(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..25)) {
        let (mut t, mut r) = page();
        let hybrid_nodes = build_hybrid_view(&t, &r).unwrap().node_count();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for pick in picks {
            let events = page_events(&t);
            let (key, ev) = pick.get(&events).clone();
            let before = serialize_raw(&t);
            let res = r.apply_atomic(&key, &ev, 0.0, &mut rng).unwrap();
            t = t.refresh(&r);
            let after = serialize_raw(&t);
            prop_assert_eq!(build_hybrid_view(&t, &r).unwrap().node_count(), hybrid_nodes);
            match res.disclosure {
                Disclosure::Reveal => prop_assert!(after.lines().count() > before.lines().count()),
                Disclosure::None => prop_assert_eq!(after.lines().count(), before.lines().count()),
                Disclosure::Conceal => {}
            }
            prop_assert_eq!(serialize_raw(&parse_raw(&after).unwrap()), after);
        }
    }
}
