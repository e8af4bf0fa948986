use std::collections::BTreeSet;

use semdiff_core::automata::Nfa;
use semdiff_core::cd::{enumerate_object_models, is_instance, ClassDiagram, ObjectModel, Universe};

/// Every object model over the joint universe with at most `k` objects per
/// class that instantiates `cd1` and not `cd2`, smallest first.
pub fn brute_cddiff(cd1: &ClassDiagram, cd2: &ClassDiagram, k: usize) -> Vec<ObjectModel> {
    let universe = Universe::joint(cd1, cd2);
    let mut out: Vec<ObjectModel> = enumerate_object_models(&universe, k)
        .filter(|om| is_instance(om, cd1).holds() && !is_instance(om, cd2).holds())
        .collect();
    out.sort_by_cached_key(|om| (om.len(), om.canonical_body()));
    out
}

/// Number of candidate links over the joint universe with `k` objects per
/// class; the brute-force enumeration visits `2^n` link sets per level.
pub fn link_space(cd1: &ClassDiagram, cd2: &ClassDiagram, k: usize) -> usize {
    let u = Universe::joint(cd1, cd2);
    let classes = u.classes();
    let assocs: Vec<&str> = u.association_names().collect();
    assocs
        .iter()
        .map(|a| {
            let pairs = classes
                .iter()
                .flat_map(|s| classes.iter().map(move |d| (s, d)));
            pairs.filter(|(s, d)| u.compatible(a, s, d)).count() * k * k
        })
        .sum()
}

/// Words of `left` missing from `right`, dropping any that extends a
/// shorter such word. Ordered by length, then lexicographically.
pub fn prefix_minimal_difference(left: &[Vec<String>], right: &[Vec<String>]) -> Vec<Vec<String>> {
    let right: BTreeSet<&Vec<String>> = right.iter().collect();
    let diff: BTreeSet<&Vec<String>> = left.iter().filter(|w| !right.contains(w)).collect();
    let mut out: Vec<Vec<String>> = diff
        .iter()
        .filter(|w| (0..w.len()).all(|i| !diff.contains(&w[..i].to_vec())))
        .map(|w| (*w).clone())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every word over `alphabet` of length at most `max_len` that `nfa` accepts,
/// found by running the automaton on each candidate.
pub fn accepted_words(nfa: &Nfa, alphabet: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<String>> = vec![Vec::new()];
    for len in 0..=max_len {
        out.extend(level.iter().filter(|w| nfa.accepts(w)).cloned());
        if len == max_len {
            break;
        }
        level = level
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    out
}
