use proptest::prelude::*;
use semdiff_core::ad::{addiff, parse_trace};
use semdiff_core::cd::{cddiff, parse_om};
use semdiff_core::render::{
    render_ad_diff, render_cd_diff, render_om, render_trace, validate_dot, Direction, Format,
};
use semdiff_testkit::fixtures::*;
use semdiff_testkit::gen::{random_ad_pair, random_cd_pair};
use semdiff_testkit::rng;

#[test]
fn three_task_witness_as_json() {
    let d = cddiff(&cd(CD1_V1), &cd(CD1_V2), 3, 1);
    let v: serde_json::Value =
        serde_json::from_str(&render_om(&d.witnesses[0], Format::Json).payload).unwrap();
    assert_eq!(v["objects"].as_array().unwrap().len(), 4);
    assert_eq!(v["links"].as_array().unwrap().len(), 3);
}

#[test]
fn key_card_witness_numbering() {
    let (v2, v3) = (ad(AD_V2), ad(AD_V3));
    let d = addiff(&v2, &v3, 10, None).unwrap();
    let t = d
        .witnesses
        .iter()
        .find(|t| {
            let p = t.actions.iter().position(|a| a == "assignProject");
            let k = t.actions.iter().position(|a| a == "getKeyCard");
            matches!((p, k), (Some(p), Some(k)) if p < k)
        })
        .expect("a witness with the project assigned first");
    let dot = render_trace(&v2, t, Format::Dot).payload;
    validate_dot(&dot).unwrap();
    let step = |action: &str| -> usize {
        let at = dot
            .find(&format!("label=\"{action}\\n["))
            .unwrap_or_else(|| panic!("{action} not numbered\n{dot}"));
        let rest = &dot[at + action.len() + 10..];
        rest[..rest.find(']').unwrap()].parse().unwrap()
    };
    assert!(step("assignProject") < step("getKeyCard"));
}

#[test]
fn diff_json_schema() {
    let d = addiff(&ad(AD_V2), &ad(AD_V3), 5, None).unwrap();
    let v: serde_json::Value = serde_json::from_str(
        &render_ad_diff(&ad(AD_V2), &d, Direction::AtoB, Format::Json).payload,
    )
    .unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["bound", "direction", "exhausted", "witnesses"]);
    assert_eq!(v["direction"], "AtoB");
    assert!(v["bound"].is_null());
    assert!(v["witnesses"][0]["inputs"].is_object() && v["witnesses"][0]["actions"].is_array());

    let d = cddiff(&cd(CD1_V2), &cd(CD1_V1), 3, 2);
    let v: serde_json::Value =
        serde_json::from_str(&render_cd_diff(&d, Direction::BtoA, Format::Json).payload).unwrap();
    assert_eq!(v["direction"], "BtoA");
    assert_eq!(v["bound"], 3);
    assert_eq!(v["exhausted"], false);
    assert_eq!(v["witnesses"][0]["objects"][0]["id"], "manager1");
}

#[test]
fn text_forms_reparse() {
    let om = om(THREE_TASKS_OM);
    assert_eq!(parse_om(&render_om(&om, Format::Text).payload).unwrap(), om);
    let t = trace(KEY_CARD_LATE_TRACE);
    assert_eq!(
        parse_trace(&render_trace(&ad(AD_V2), &t, Format::Text).payload).unwrap(),
        t
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cd_renderings_are_valid_and_stable(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let d = cddiff(&a, &b, k, 5);
        for f in [Format::Text, Format::Dot, Format::Json] {
            let r = render_cd_diff(&d, Direction::AtoB, f);
            prop_assert_eq!(&r, &render_cd_diff(&cddiff(&a, &b, k, 5), Direction::AtoB, f));
            match f {
                Format::Dot => prop_assert!(validate_dot(&r.payload).is_ok(), "{}", r.payload),
                Format::Json => prop_assert!(serde_json::from_str::<serde_json::Value>(&r.payload).is_ok()),
                Format::Text => {}
            }
        }
        for w in &d.witnesses {
            prop_assert!(validate_dot(&render_om(w, Format::Dot).payload).is_ok());
            prop_assert_eq!(&parse_om(&render_om(w, Format::Text).payload).unwrap(), w);
        }
    }

    #[test]
    fn ad_renderings_are_valid_and_stable(seed in any::<u64>()) {
        let (a, b) = random_ad_pair(&mut rng(seed));
        let d = addiff(&a, &b, 5, None).unwrap();
        let dot = render_ad_diff(&a, &d, Direction::AtoB, Format::Dot).payload;
        prop_assert!(validate_dot(&dot).is_ok(), "{}", dot);
        prop_assert_eq!(dot, render_ad_diff(&a, &addiff(&a, &b, 5, None).unwrap(), Direction::AtoB, Format::Dot).payload);
        for t in &d.witnesses {
            prop_assert!(validate_dot(&render_trace(&a, t, Format::Dot).payload).is_ok());
            prop_assert_eq!(&parse_trace(&render_trace(&a, t, Format::Text).payload).unwrap(), t);
        }
    }
}
