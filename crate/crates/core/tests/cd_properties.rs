use std::collections::BTreeSet;

use proptest::prelude::*;
use semdiff_core::cd::{
    cddiff, compare_cd, is_instance, parse_cd, parse_om, subtype_set, ClassDiagram,
};
use semdiff_core::VerdictValue;
use semdiff_testkit::gen::{random_cd, random_cd_pair};
use semdiff_testkit::oracle::brute_cddiff;
use semdiff_testkit::rng;

fn bodies(d: &semdiff_core::cd::CdDiffResult) -> Vec<String> {
    d.witnesses.iter().map(|w| w.canonical_body()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn search_matches_brute_force(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let fast = cddiff(&a, &b, k, usize::MAX);
        let slow: Vec<String> = brute_cddiff(&a, &b, k).iter().map(|w| w.canonical_body()).collect();
        prop_assert!(fast.exhausted);
        prop_assert_eq!(bodies(&fast), slow, "\n{}\n{}\nk={}", a, b, k);
    }

    #[test]
    fn truncated_search_is_a_prefix(seed in any::<u64>(), cap in 0usize..4) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let full = cddiff(&a, &b, k, usize::MAX);
        let part = cddiff(&a, &b, k, cap);
        let n = full.witnesses.len().min(cap);
        prop_assert_eq!(&bodies(&part)[..], &bodies(&full)[..n]);
        prop_assert_eq!(part.exhausted, full.witnesses.len() <= cap);
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        for w in cddiff(&a, &b, k, 20).witnesses {
            prop_assert!(is_instance(&w, &a).holds());
            prop_assert!(!is_instance(&w, &b).holds());
            prop_assert!(w.max_instances_per_class() <= k);
            prop_assert_eq!(parse_om(&w.to_string()).unwrap(), w);
        }
    }

    #[test]
    fn self_difference_is_empty(seed in any::<u64>()) {
        let (a, _, k) = random_cd_pair(&mut rng(seed));
        let d = cddiff(&a, &a, k, 5);
        prop_assert!(d.is_empty() && d.exhausted);
        prop_assert_eq!(compare_cd(&a, &a, k).value, VerdictValue::Equivalent);
    }

    #[test]
    fn directions_are_disjoint(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let fwd: BTreeSet<String> = bodies(&cddiff(&a, &b, k, usize::MAX)).into_iter().collect();
        let bwd: BTreeSet<String> = bodies(&cddiff(&b, &a, k, usize::MAX)).into_iter().collect();
        prop_assert!(fwd.is_disjoint(&bwd));
    }

    #[test]
    fn larger_bounds_keep_witnesses(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let small: BTreeSet<String> = bodies(&cddiff(&a, &b, k - 1, usize::MAX)).into_iter().collect();
        let large: BTreeSet<String> = bodies(&cddiff(&a, &b, k, usize::MAX)).into_iter().collect();
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn verdict_agrees_with_diffs(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        let v = compare_cd(&a, &b, k);
        prop_assert_eq!(v.bound, Some(k));
        prop_assert_eq!(compare_cd(&b, &a, k).value, v.value.mirrored());
        let fwd = cddiff(&a, &b, k, 1).is_empty();
        let bwd = cddiff(&b, &a, k, 1).is_empty();
        prop_assert_eq!(v.value, VerdictValue::from_emptiness(fwd, bwd));
    }

    #[test]
    fn search_is_deterministic(seed in any::<u64>()) {
        let (a, b, k) = random_cd_pair(&mut rng(seed));
        prop_assert_eq!(cddiff(&a, &b, k, 10), cddiff(&a, &b, k, 10));
    }

    #[test]
    fn diagrams_round_trip(seed in any::<u64>()) {
        let cd = random_cd(&mut rng(seed), "x");
        prop_assert_eq!(parse_cd(&cd.to_string()).unwrap(), cd);
    }

    #[test]
    fn subtype_sets_are_reflexive_and_transitive(seed in any::<u64>()) {
        let cd = random_cd(&mut rng(seed), "x");
        for c in cd.classes.keys() {
            let subs = subtype_set(&cd, c).unwrap();
            prop_assert!(subs.contains(c));
            for s in &subs {
                prop_assert!(subtype_set(&cd, s).unwrap().is_subset(&subs));
            }
        }
    }

    #[test]
    fn adding_a_parent_only_grows_subtype_sets(seed in any::<u64>()) {
        let cd = random_cd(&mut rng(seed), "x");
        let orphans: Vec<&String> = cd.classes.values().filter(|c| c.parent.is_none()).map(|c| &c.name).collect();
        if let (Some(child), Some(parent)) = (orphans.last(), cd.classes.keys().next()) {
            if *child != parent && !cd.is_subtype(parent, child) {
                let mut more: ClassDiagram = cd.clone();
                more.classes.get_mut(*child).unwrap().parent = Some(parent.clone());
                for c in cd.classes.keys() {
                    prop_assert!(subtype_set(&cd, c).unwrap().is_subset(&subtype_set(&more, c).unwrap()));
                }
            }
        }
    }
}
