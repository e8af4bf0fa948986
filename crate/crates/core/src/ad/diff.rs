use super::ast::ActivityDiagram;
use super::semantics::{build_config_nfa, input_valuations, AdError};
use super::trace::Trace;
use crate::automata::difference_automaton;
use crate::verdict::{Verdict, VerdictValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdDiffResult {
    /// Grouped by valuation, then shortest first, then lexicographic.
    pub witnesses: Vec<Trace>,
    /// The whole difference was explored and every prefix-minimal witness
    /// is listed.
    pub exhausted: bool,
    pub max_witnesses: usize,
    pub max_len: Option<usize>,
}

impl AdDiffResult {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Traces of `ad1` that `ad2` cannot produce under the same inputs, keeping
/// only those with no proper prefix that is itself such a trace.
pub fn addiff(
    ad1: &ActivityDiagram,
    ad2: &ActivityDiagram,
    max_witnesses: usize,
    max_len: Option<usize>,
) -> Result<AdDiffResult, AdError> {
    let alphabet: Vec<String> = ad1
        .action_names()
        .union(&ad2.action_names())
        .map(|s| s.to_string())
        .collect();
    let mut witnesses = Vec::new();
    let mut exhausted = true;
    for v in input_valuations(ad1.inputs(), ad2.inputs())? {
        let a = build_config_nfa(ad1, &v)?.nfa.over_alphabet(&alphabet);
        let b = build_config_nfa(ad2, &v)?.nfa.over_alphabet(&alphabet);
        let diff = difference_automaton(&a, &b);
        let room = max_witnesses - witnesses.len();
        let (words, complete) = diff.product.minimal_words(room, max_len);
        witnesses.extend(words.iter().map(|w| Trace {
            inputs: v.clone(),
            actions: diff.product.word(w),
        }));
        if !complete {
            exhausted = false;
            if witnesses.len() == max_witnesses {
                break;
            }
        }
    }
    Ok(AdDiffResult {
        witnesses,
        exhausted,
        max_witnesses,
        max_len,
    })
}

/// Exact comparison of the trace sets under every input valuation.
pub fn compare_ad(ad1: &ActivityDiagram, ad2: &ActivityDiagram) -> Result<Verdict, AdError> {
    let alphabet: Vec<String> = ad1
        .action_names()
        .union(&ad2.action_names())
        .map(|s| s.to_string())
        .collect();
    let (mut left_in_right, mut right_in_left) = (true, true);
    for v in input_valuations(ad1.inputs(), ad2.inputs())? {
        let a = build_config_nfa(ad1, &v)?.nfa.over_alphabet(&alphabet);
        let b = build_config_nfa(ad2, &v)?.nfa.over_alphabet(&alphabet);
        left_in_right &= difference_automaton(&a, &b).is_empty();
        right_in_left &= difference_automaton(&b, &a).is_empty();
    }
    Ok(Verdict::exact(VerdictValue::from_emptiness(
        left_in_right,
        right_in_left,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::parse_ad;

    fn ad(src: &str) -> ActivityDiagram {
        parse_ad(src).unwrap()
    }

    #[test]
    fn identical_diagrams() {
        let a = ad("activity A { fork f; action x; action y; join j; start -> f; f -> x; f -> y; x -> j; y -> j; j -> end; }");
        let d = addiff(&a, &a, 10, None).unwrap();
        assert!(d.is_empty() && d.exhausted);
        assert_eq!(compare_ad(&a, &a).unwrap().value, VerdictValue::Equivalent);
    }

    #[test]
    fn sequence_refines_interleaving() {
        let par = ad("activity P { fork f; action x; action y; join j; start -> f; f -> x; f -> y; x -> j; y -> j; j -> end; }");
        let seq = ad("activity S { action x; action y; start -> x; x -> y; y -> end; }");
        let d = addiff(&par, &seq, 10, None).unwrap();
        assert_eq!(d.witnesses.len(), 1);
        assert_eq!(d.witnesses[0].actions, ["y", "x"]);
        assert!(addiff(&seq, &par, 10, None).unwrap().is_empty());
        assert_eq!(
            compare_ad(&seq, &par).unwrap().value,
            VerdictValue::LeftRefinesRight
        );
        assert_eq!(compare_ad(&seq, &par).unwrap().bound, None);
    }

    #[test]
    fn loops_truncate() {
        let lp = ad("activity L { merge m; action a; decision d; start -> m; m -> a; a -> d; d -[true]-> m; d -[true]-> end; }");
        let one = ad("activity O { action a; start -> a; a -> end; }");
        let d = addiff(&lp, &one, 3, None).unwrap();
        assert_eq!(d.witnesses.len(), 1);
        assert_eq!(d.witnesses[0].actions, ["a", "a"]);
        assert!(d.exhausted);
        let bounded = addiff(
            &lp,
            &ad("activity E { action b; start -> b; b -> end; }"),
            3,
            Some(5),
        )
        .unwrap();
        assert_eq!(bounded.witnesses.len(), 1);
        assert!(bounded.exhausted);
    }

    #[test]
    fn witness_cap() {
        let many = ad("activity M { decision d; action a; action b; action c; merge m;
            start -> d; d -[true]-> a; d -[true]-> b; d -[true]-> c; a -> m; b -> m; c -> m; m -> end; }");
        let none = ad("activity N { action z; start -> z; z -> end; }");
        let d = addiff(&many, &none, 2, None).unwrap();
        assert_eq!(d.witnesses.len(), 2);
        assert!(!d.exhausted);
        let d = addiff(&many, &none, 3, None).unwrap();
        assert_eq!(d.witnesses.len(), 3);
        assert!(d.exhausted);
    }

    #[test]
    fn valuations_kept_apart() {
        let a = ad(
            "activity A { input b: bool; decision d; action x; action y; merge m;
            start -> d; d -[b]-> x; d -[!b]-> y; x -> m; y -> m; m -> end; }",
        );
        let b = ad(
            "activity B { input b: bool; decision d; action x; action y; merge m;
            start -> d; d -[!b]-> x; d -[b]-> y; x -> m; y -> m; m -> end; }",
        );
        let d = addiff(&a, &b, 10, None).unwrap();
        let got: Vec<String> = d.witnesses.iter().map(Trace::summary).collect();
        assert_eq!(got, ["b=false: y", "b=true: x"]);
        assert_eq!(
            compare_ad(&a, &b).unwrap().value,
            VerdictValue::Incomparable
        );
    }
}
