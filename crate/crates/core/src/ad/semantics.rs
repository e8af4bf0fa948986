use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use super::ast::{ActivityDiagram, AssignSource, Domain, NodeKind, VarDecl, VarKind};
use super::trace::Trace;
use crate::automata::Nfa;

/// Variable name -> value.
pub type Valuation = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdError {
    #[error("input `{var}` has domain {left} in one diagram and {right} in the other")]
    DomainMismatch {
        var: String,
        left: String,
        right: String,
    },
    #[error("no value given for input `{var}`")]
    MissingInput { var: String },
    #[error("`{value}` is not a value of input `{var}`")]
    BadInputValue { var: String, value: String },
    #[error("activity `{diagram}` is not 1-safe: a second token would be placed on edge {edge} in configuration {configuration}")]
    NotSafe {
        diagram: String,
        edge: String,
        configuration: String,
    },
}

/// All valuations of the union of two input signatures: variables sorted by
/// name, the first one varying slowest, values in domain order.
pub fn input_valuations<'a>(
    inputs_a: impl IntoIterator<Item = &'a VarDecl>,
    inputs_b: impl IntoIterator<Item = &'a VarDecl>,
) -> Result<Vec<Valuation>, AdError> {
    let mut sig: BTreeMap<&str, &Domain> = BTreeMap::new();
    for v in inputs_a.into_iter().chain(inputs_b) {
        if let Some(prev) = sig.insert(&v.name, &v.domain) {
            if prev != &v.domain {
                return Err(AdError::DomainMismatch {
                    var: v.name.clone(),
                    left: prev.to_string(),
                    right: v.domain.to_string(),
                });
            }
        }
    }
    let mut out = vec![Valuation::new()];
    for (name, domain) in sig {
        out = out
            .into_iter()
            .flat_map(|val| {
                domain.values().into_iter().map(move |x| {
                    let mut v = val.clone();
                    v.insert(name.to_string(), x);
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// A snapshot of a run: which edges hold a token and the variable values
/// (as indices into each variable's domain, in declaration order).
/// A terminated run has an empty marking and `terminated` set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    marking: Vec<u64>,
    values: Vec<u16>,
    terminated: bool,
}

impl Configuration {
    pub fn marked_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.marking.iter().enumerate().flat_map(|(w, bits)| {
            (0..64)
                .filter(move |b| bits >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }

    pub fn is_marked(&self, edge: usize) -> bool {
        self.marking[edge / 64] >> (edge % 64) & 1 == 1
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn value_index(&self, var: usize) -> usize {
        self.values[var] as usize
    }

    fn set(&mut self, edge: usize, on: bool) {
        if on {
            self.marking[edge / 64] |= 1 << (edge % 64);
        } else {
            self.marking[edge / 64] &= !(1 << (edge % 64));
        }
    }
}

/// The reachable configuration graph of one diagram under one valuation.
#[derive(Debug, Clone)]
pub struct ConfigNfa {
    pub nfa: Nfa,
    /// state -> configuration
    pub configurations: Vec<Configuration>,
}

/// Executable form of a diagram: adjacency, domains, and the firing rules.
pub(crate) struct Machine<'a> {
    ad: &'a ActivityDiagram,
    domains: Vec<Vec<String>>,
    var_index: HashMap<&'a str, usize>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    words: usize,
}

impl<'a> Machine<'a> {
    pub(crate) fn new(ad: &'a ActivityDiagram) -> Self {
        let node_ix: HashMap<&str, usize> = ad
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.as_str(), i))
            .collect();
        let mut ins = vec![Vec::new(); ad.nodes.len()];
        let mut outs = vec![Vec::new(); ad.nodes.len()];
        for (i, e) in ad.edges.iter().enumerate() {
            outs[node_ix[e.source.as_str()]].push(i);
            ins[node_ix[e.target.as_str()]].push(i);
        }
        Machine {
            ad,
            domains: ad.variables.iter().map(|v| v.domain.values()).collect(),
            var_index: ad
                .variables
                .iter()
                .enumerate()
                .map(|(i, v)| (v.name.as_str(), i))
                .collect(),
            ins,
            outs,
            words: ad.edges.len().div_ceil(64).max(1),
        }
    }

    pub(crate) fn initial(&self, inputs: &Valuation) -> Result<Configuration, AdError> {
        let mut values = Vec::with_capacity(self.ad.variables.len());
        for v in &self.ad.variables {
            let value = match v.kind {
                VarKind::Local => v.initial.clone().unwrap_or_default(),
                VarKind::Input => inputs.get(&v.name).cloned().ok_or(AdError::MissingInput {
                    var: v.name.clone(),
                })?,
            };
            let ix = v
                .domain
                .index_of(&value)
                .ok_or_else(|| AdError::BadInputValue {
                    var: v.name.clone(),
                    value: value.clone(),
                })?;
            values.push(ix as u16);
        }
        let mut c = Configuration {
            marking: vec![0; self.words],
            values,
            terminated: false,
        };
        let start = self
            .ad
            .nodes
            .iter()
            .position(|n| n.kind == NodeKind::Initial)
            .expect("validated diagram");
        for &e in &self.outs[start] {
            c.set(e, true);
        }
        Ok(c)
    }

    /// Every enabled firing: `(Some(action node), next)` for actions,
    /// `(None, next)` for silent moves.
    pub(crate) fn successors(
        &self,
        c: &Configuration,
    ) -> Result<Vec<(Option<usize>, Configuration)>, AdError> {
        let mut out = Vec::new();
        if c.terminated {
            return Ok(out);
        }
        for (n, node) in self.ad.nodes.iter().enumerate() {
            let ins = &self.ins[n];
            let outs = &self.outs[n];
            match node.kind {
                NodeKind::Initial => {}
                NodeKind::Final => {
                    if ins.iter().any(|&e| c.is_marked(e)) {
                        out.push((
                            None,
                            Configuration {
                                marking: vec![0; self.words],
                                values: c.values.clone(),
                                terminated: true,
                            },
                        ));
                    }
                }
                NodeKind::Action => {
                    for &e in ins.iter().filter(|&&e| c.is_marked(e)) {
                        let mut next = c.clone();
                        next.set(e, false);
                        for a in &node.assignments {
                            let t = self.var_index[a.target.as_str()];
                            next.values[t] = match &a.source {
                                AssignSource::Value(x) => {
                                    self.domains[t].iter().position(|d| d == x).unwrap_or(0) as u16
                                }
                                AssignSource::Var(s) => c.values[self.var_index[s.as_str()]],
                            };
                        }
                        self.mark(&mut next, outs, c)?;
                        out.push((Some(n), next));
                    }
                }
                NodeKind::Decision => {
                    for &e in ins.iter().filter(|&&e| c.is_marked(e)) {
                        for &o in outs {
                            let holds = self.ad.edges[o]
                                .guard
                                .as_ref()
                                .is_none_or(|g| g.eval(&|v| self.value_of(c, v)));
                            if holds {
                                let mut next = c.clone();
                                next.set(e, false);
                                self.mark(&mut next, &[o], c)?;
                                out.push((None, next));
                            }
                        }
                    }
                }
                NodeKind::Merge => {
                    for &e in ins.iter().filter(|&&e| c.is_marked(e)) {
                        let mut next = c.clone();
                        next.set(e, false);
                        self.mark(&mut next, outs, c)?;
                        out.push((None, next));
                    }
                }
                NodeKind::Fork | NodeKind::Join => {
                    if !ins.is_empty() && ins.iter().all(|&e| c.is_marked(e)) {
                        let mut next = c.clone();
                        for &e in ins {
                            next.set(e, false);
                        }
                        self.mark(&mut next, outs, c)?;
                        out.push((None, next));
                    }
                }
            }
        }
        Ok(out)
    }

    fn mark(
        &self,
        next: &mut Configuration,
        edges: &[usize],
        before: &Configuration,
    ) -> Result<(), AdError> {
        for &o in edges {
            if next.is_marked(o) {
                let e = &self.ad.edges[o];
                return Err(AdError::NotSafe {
                    diagram: self.ad.name.clone(),
                    edge: format!("{} -> {}", e.source, e.target),
                    configuration: self.describe(before),
                });
            }
            next.set(o, true);
        }
        Ok(())
    }

    fn value_of(&self, c: &Configuration, var: &str) -> Option<&str> {
        let i = *self.var_index.get(var)?;
        Some(self.domains[i][c.values[i] as usize].as_str())
    }

    pub(crate) fn action_name(&self, node: usize) -> &str {
        &self.ad.nodes[node].name
    }

    pub(crate) fn describe(&self, c: &Configuration) -> String {
        let edges: Vec<String> = c
            .marked_edges()
            .map(|i| format!("{}->{}", self.ad.edges[i].source, self.ad.edges[i].target))
            .collect();
        let vals: Vec<String> = self
            .ad
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{}={}", v.name, self.domains[i][c.values[i] as usize]))
            .collect();
        format!(
            "{{tokens: [{}], vars: [{}]}}",
            edges.join(", "),
            vals.join(", ")
        )
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.marked_edges().map(|e| e.to_string()).collect();
        write!(f, "[{}]", edges.join(","))?;
        if self.terminated {
            f.write_str(" done")?;
        }
        Ok(())
    }
}

/// Builds the automaton whose language is the set of action sequences of
/// complete runs of `ad` when its inputs start at `inputs`.
pub fn build_config_nfa(ad: &ActivityDiagram, inputs: &Valuation) -> Result<ConfigNfa, AdError> {
    let m = Machine::new(ad);
    let init = m.initial(inputs)?;
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut configurations = vec![init.clone()];
    index.insert(init, 0);
    let mut edges: Vec<Vec<(Option<String>, usize)>> = vec![Vec::new()];
    let mut todo = VecDeque::from([0]);
    while let Some(s) = todo.pop_front() {
        for (label, next) in m.successors(&configurations[s])? {
            let t = *index.entry(next.clone()).or_insert_with(|| {
                configurations.push(next);
                edges.push(Vec::new());
                todo.push_back(configurations.len() - 1);
                configurations.len() - 1
            });
            edges[s].push((label.map(|n| m.action_name(n).to_string()), t));
        }
    }
    let mut nfa = Nfa::new(
        ad.action_names().into_iter().map(str::to_string),
        configurations.len(),
        0,
    );
    for (s, out) in edges.into_iter().enumerate() {
        nfa.transitions[s] = out
            .into_iter()
            .map(|(l, t)| (l.map(|l| nfa.symbol(&l).expect("action")), t))
            .collect();
    }
    nfa.accepting = configurations
        .iter()
        .map(Configuration::is_terminated)
        .collect();
    Ok(ConfigNfa {
        nfa,
        configurations,
    })
}

/// Whether `trace` is a complete run of `ad`.
pub fn accepts(ad: &ActivityDiagram, trace: &Trace) -> Result<bool, AdError> {
    Ok(build_config_nfa(ad, &trace.inputs)?
        .nfa
        .accepts(&trace.actions))
}

/// Configurations reachable from `start` by silent moves.
fn silent_closure(
    m: &Machine,
    start: Vec<Configuration>,
) -> Result<BTreeSet<Configuration>, AdError> {
    let mut set = BTreeSet::new();
    let mut todo = start;
    while let Some(c) = todo.pop() {
        if set.contains(&c) {
            continue;
        }
        for (label, next) in m.successors(&c)? {
            if label.is_none() {
                todo.push(next);
            }
        }
        set.insert(c);
    }
    Ok(set)
}

/// Whether `trace` is a complete run of `ad`, decided by playing the token
/// game along the trace without building an automaton.
pub fn replay(ad: &ActivityDiagram, trace: &Trace) -> Result<bool, AdError> {
    let m = Machine::new(ad);
    let mut current = silent_closure(&m, vec![m.initial(&trace.inputs)?])?;
    for action in &trace.actions {
        let mut next = Vec::new();
        for c in &current {
            for (label, succ) in m.successors(c)? {
                if label.is_some_and(|n| m.action_name(n) == action) {
                    next.push(succ);
                }
            }
        }
        current = silent_closure(&m, next)?;
        if current.is_empty() {
            return Ok(false);
        }
    }
    Ok(current.iter().any(Configuration::is_terminated))
}

/// Action sequences of complete runs of length at most `max_len`, shortest
/// first then lexicographic. Computed by direct simulation of the token
/// game, without building an automaton.
pub fn enumerate_traces(
    ad: &ActivityDiagram,
    inputs: &Valuation,
    max_len: usize,
) -> Result<Vec<Vec<String>>, AdError> {
    let m = Machine::new(ad);
    let mut level: BTreeMap<Vec<String>, BTreeSet<Configuration>> = BTreeMap::new();
    level.insert(Vec::new(), silent_closure(&m, vec![m.initial(inputs)?])?);
    let mut out = Vec::new();
    for len in 0..=max_len {
        for (word, configs) in &level {
            if configs.iter().any(Configuration::is_terminated) {
                out.push(word.clone());
            }
        }
        if len == max_len {
            break;
        }
        let mut next: BTreeMap<Vec<String>, Vec<Configuration>> = BTreeMap::new();
        for (word, configs) in &level {
            for c in configs {
                for (label, succ) in m.successors(c)? {
                    if let Some(n) = label {
                        let mut w = word.clone();
                        w.push(m.action_name(n).to_string());
                        next.entry(w).or_default().push(succ);
                    }
                }
            }
        }
        level = BTreeMap::new();
        for (w, cs) in next {
            level.insert(w, silent_closure(&m, cs)?);
        }
        if level.is_empty() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::parse_ad;

    fn val(pairs: &[(&str, &str)]) -> Valuation {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn words(ws: &[Vec<String>]) -> Vec<String> {
        ws.iter().map(|w| w.join(" ")).collect()
    }

    #[test]
    fn valuations_of_one_bool() {
        let ad = parse_ad("activity A { input b: bool; action a; start -> a; a -> end; }").unwrap();
        let vs = input_valuations(ad.inputs(), []).unwrap();
        assert_eq!(vs, vec![val(&[("b", "false")]), val(&[("b", "true")])]);
    }

    #[test]
    fn valuations_of_union() {
        let b = VarDecl::input("b", Domain::Bool);
        let s = VarDecl::input(
            "status",
            Domain::Enum(vec!["internal".into(), "external".into()]),
        );
        let vs = input_valuations([&b], [&b, &s]).unwrap();
        assert_eq!(vs.len(), 4);
        assert_eq!(vs[1], val(&[("b", "false"), ("status", "external")]));
    }

    #[test]
    fn valuations_reject_domain_clash() {
        let b = VarDecl::input("s", Domain::Bool);
        let e = VarDecl::input("s", Domain::Enum(vec!["x".into(), "y".into()]));
        assert!(matches!(
            input_valuations([&b], [&e]),
            Err(AdError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn linear_diagram() {
        let ad =
            parse_ad("activity L { action a; action b; start -> a; a -> b; b -> end; }").unwrap();
        let c = build_config_nfa(&ad, &Valuation::new()).unwrap();
        assert!(c.nfa.accepts(&["a", "b"]));
        assert!(!c.nfa.accepts(&["a"]));
        assert!(!c.nfa.accepts(&["b", "a"]));
        assert_eq!(
            words(&enumerate_traces(&ad, &Valuation::new(), 10).unwrap()),
            vec!["a b"]
        );
    }

    #[test]
    fn fork_interleaves() {
        let ad = parse_ad(
            "activity F { fork f; action a; action b; join j;
             start -> f; f -> a; f -> b; a -> j; b -> j; j -> end; }",
        )
        .unwrap();
        let traces = enumerate_traces(&ad, &Valuation::new(), 10).unwrap();
        assert_eq!(words(&traces), vec!["a b", "b a"]);
        let c = build_config_nfa(&ad, &Valuation::new()).unwrap();
        assert!(c.nfa.accepts(&["b", "a"]));
    }

    #[test]
    fn decision_follows_guard() {
        let ad = parse_ad(
            "activity D { input b: bool; decision d; action yes; action no; merge m;
             start -> d; d -[b]-> yes; d -[!b]-> no; yes -> m; no -> m; m -> end; }",
        )
        .unwrap();
        let off = build_config_nfa(&ad, &val(&[("b", "false")])).unwrap();
        let yes = off.nfa.symbol("yes").unwrap();
        assert!(off
            .nfa
            .transitions
            .iter()
            .flatten()
            .all(|&(l, _)| l != Some(yes)));
        assert!(off.nfa.accepts(&["no"]));
        assert_eq!(
            words(&enumerate_traces(&ad, &val(&[("b", "true")]), 5).unwrap()),
            vec!["yes"]
        );
    }

    #[test]
    fn loop_unrolls_up_to_bound() {
        let ad = parse_ad(
            "activity Lp { merge m; action a; decision d;
             start -> m; m -> a; a -> d; d -[true]-> m; d -[true]-> end; }",
        )
        .unwrap();
        let traces = enumerate_traces(&ad, &Valuation::new(), 4).unwrap();
        assert_eq!(words(&traces), vec!["a", "a a", "a a a", "a a a a"]);
    }

    #[test]
    fn assignments_steer_later_decisions() {
        let ad = parse_ad(
            "activity S { local done: bool = false; merge m; decision d; action work / done := true; action finish;
             start -> m; m -> d; d -[!done]-> work; work -> m; d -[done]-> finish; finish -> end; }",
        )
        .unwrap();
        let traces = enumerate_traces(&ad, &Valuation::new(), 6).unwrap();
        assert_eq!(words(&traces), vec!["work finish"]);
    }

    #[test]
    fn stuck_runs_contribute_nothing() {
        let ad = parse_ad(
            "activity St { input b: bool; decision d; action x; action y;
             start -> d; d -[b]-> x; d -[b]-> y; x -> end; y -> end; }",
        )
        .unwrap();
        assert!(enumerate_traces(&ad, &val(&[("b", "false")]), 5)
            .unwrap()
            .is_empty());
        assert!(build_config_nfa(&ad, &val(&[("b", "false")]))
            .unwrap()
            .nfa
            .is_empty());
    }

    #[test]
    fn replay_agrees_on_fork() {
        let ad = parse_ad(
            "activity F { fork f; action a; action b; join j;
             start -> f; f -> a; f -> b; a -> j; b -> j; j -> end; }",
        )
        .unwrap();
        let t = |w: &[&str]| Trace::new(Valuation::new(), w.iter().copied());
        assert!(replay(&ad, &t(&["b", "a"])).unwrap());
        assert!(!replay(&ad, &t(&["a"])).unwrap());
        assert!(!replay(&ad, &t(&["a", "a"])).unwrap());
        assert!(!replay(&ad, &t(&["a", "b", "c"])).unwrap());
    }

    #[test]
    fn empty_trace_rejected_when_actions_are_mandatory() {
        let ad = parse_ad("activity L { action a; start -> a; a -> end; }").unwrap();
        let t = Trace {
            inputs: Valuation::new(),
            actions: vec![],
        };
        assert!(!accepts(&ad, &t).unwrap());
    }

    #[test]
    fn final_discards_other_tokens() {
        let ad = parse_ad(
            "activity K { fork f; action a; action b; final stop;
             start -> f; f -> a; f -> b; a -> end; b -> stop; }",
        )
        .unwrap();
        let traces = enumerate_traces(&ad, &Valuation::new(), 5).unwrap();
        assert_eq!(words(&traces), vec!["a", "b", "a b", "b a"]);
    }

    #[test]
    fn second_token_on_marked_edge_is_an_error() {
        let ad = parse_ad(
            "activity U { fork f; action a; action b; merge m; action c;
             start -> f; f -> a; f -> b; a -> m; b -> m; m -> c; c -> end; }",
        )
        .unwrap();
        let err = build_config_nfa(&ad, &Valuation::new()).unwrap_err();
        match err {
            AdError::NotSafe { edge, .. } => assert_eq!(edge, "m -> c"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(enumerate_traces(&ad, &Valuation::new(), 5).is_err());
    }

    #[test]
    fn missing_input_is_reported() {
        let ad = parse_ad("activity A { input b: bool; action a; start -> a; a -> end; }").unwrap();
        assert!(matches!(
            build_config_nfa(&ad, &Valuation::new()),
            Err(AdError::MissingInput { .. })
        ));
    }
}
