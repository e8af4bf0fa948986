//! Finite automata over string-labelled alphabets: epsilon-NFAs, subset
//! construction, complement, and the language-difference product.

use std::collections::{BTreeSet, HashMap, VecDeque};

/// Nondeterministic automaton with epsilon moves. Symbols are indices into
/// `alphabet`, which is sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub alphabet: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// Per state: `(None, q)` is an epsilon move, `(Some(a), q)` reads `alphabet[a]`.
    pub transitions: Vec<Vec<(Option<usize>, usize)>>,
}

impl Nfa {
    /// An automaton with `n` states and no transitions.
    pub fn new(alphabet: impl IntoIterator<Item = String>, n: usize, initial: usize) -> Self {
        let alphabet: Vec<String> = alphabet
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Nfa {
            alphabet,
            initial,
            accepting: vec![false; n],
            transitions: vec![Vec::new(); n],
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.transitions.push(Vec::new());
        self.accepting.push(accepting);
        self.transitions.len() - 1
    }

    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.alphabet
            .binary_search_by(|s| s.as_str().cmp(name))
            .ok()
    }

    pub fn epsilon_closure(&self, states: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        let mut todo: Vec<usize> = states.into_iter().collect();
        while let Some(q) = todo.pop() {
            if set.insert(q) {
                todo.extend(
                    self.transitions[q]
                        .iter()
                        .filter(|(l, _)| l.is_none())
                        .map(|&(_, r)| r),
                );
            }
        }
        set
    }

    /// Epsilon-closed successor set after reading `sym`.
    pub fn step(&self, states: &BTreeSet<usize>, sym: usize) -> BTreeSet<usize> {
        self.epsilon_closure(states.iter().flat_map(|&q| {
            self.transitions[q]
                .iter()
                .filter(move |(l, _)| *l == Some(sym))
                .map(|&(_, r)| r)
        }))
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut cur = self.epsilon_closure([self.initial]);
        for w in word {
            let Some(sym) = self.symbol(w.as_ref()) else {
                return false;
            };
            cur = self.step(&cur, sym);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Same language over a larger alphabet.
    pub fn over_alphabet(&self, alphabet: &[String]) -> Nfa {
        let map: Vec<usize> = self
            .alphabet
            .iter()
            .map(|s| {
                alphabet
                    .binary_search(s)
                    .expect("alphabet must be a superset")
            })
            .collect();
        Nfa {
            alphabet: alphabet.to_vec(),
            initial: self.initial,
            accepting: self.accepting.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|ts| ts.iter().map(|&(l, q)| (l.map(|a| map[a]), q)).collect())
                .collect(),
        }
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut todo = vec![self.initial];
        while let Some(q) = todo.pop() {
            if !std::mem::replace(&mut seen[q], true) {
                todo.extend(self.transitions[q].iter().map(|&(_, r)| r));
            }
        }
        seen
    }

    /// States from which some accepting state is reachable.
    pub fn co_reachable(&self) -> Vec<bool> {
        let mut preds = vec![Vec::new(); self.num_states()];
        for (q, ts) in self.transitions.iter().enumerate() {
            for &(_, r) in ts {
                preds[r].push(q);
            }
        }
        let mut live = self.accepting.clone();
        let mut todo: Vec<usize> = (0..self.num_states()).filter(|&q| live[q]).collect();
        while let Some(q) = todo.pop() {
            for &p in &preds[q] {
                if !std::mem::replace(&mut live[p], true) {
                    todo.push(p);
                }
            }
        }
        live
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable();
        !(0..self.num_states()).any(|q| reach[q] && self.accepting[q])
    }

    /// Accepted words none of whose proper prefixes is accepted, in order
    /// of length then lexicographic symbol order, at most `max_words` of
    /// them and none longer than `max_len`.
    ///
    /// Words are explored breadth-first over subsets of states; a word is
    /// extended only while its subset can still reach acceptance, so the
    /// search ends whenever the set of such words is finite. The flag is
    /// true if the search ran to completion without hitting either limit.
    pub fn minimal_words(
        &self,
        max_words: usize,
        max_len: Option<usize>,
    ) -> (Vec<Vec<usize>>, bool) {
        let live = self.co_reachable();
        let is_live = |s: &BTreeSet<usize>| s.iter().any(|&q| live[q]);
        let mut found = Vec::new();
        let start = self.epsilon_closure([self.initial]);
        let mut frontier: Vec<(Vec<usize>, BTreeSet<usize>)> = if is_live(&start) {
            vec![(Vec::new(), start)]
        } else {
            Vec::new()
        };
        let mut cut = false;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (word, set) in frontier {
                if set.iter().any(|&q| self.accepting[q]) {
                    if found.len() == max_words {
                        return (found, false);
                    }
                    found.push(word);
                    continue;
                }
                if max_len.is_some_and(|l| word.len() >= l) {
                    cut = true;
                    continue;
                }
                for sym in 0..self.alphabet.len() {
                    let succ = self.step(&set, sym);
                    if is_live(&succ) {
                        let mut w = word.clone();
                        w.push(sym);
                        next.push((w, succ));
                    }
                }
            }
            frontier = next;
        }
        (found, !cut)
    }

    pub fn word(&self, symbols: &[usize]) -> Vec<String> {
        symbols.iter().map(|&s| self.alphabet[s].clone()).collect()
    }
}

/// Complete deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `delta[state][symbol]`, total.
    pub delta: Vec<Vec<usize>>,
}

impl Dfa {
    /// Subset construction. The empty subset, when reachable, is the sink
    /// that makes the transition function total.
    pub fn determinize(nfa: &Nfa) -> Dfa {
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let start = nfa.epsilon_closure([nfa.initial]);
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut todo = VecDeque::from([0]);
        while let Some(d) = todo.pop_front() {
            let mut row = Vec::with_capacity(nfa.alphabet.len());
            for sym in 0..nfa.alphabet.len() {
                let succ = nfa.step(&subsets[d], sym);
                let id = *index.entry(succ.clone()).or_insert_with(|| {
                    subsets.push(succ);
                    todo.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                row.push(id);
            }
            if delta.len() <= d {
                delta.resize(d + 1, Vec::new());
            }
            delta[d] = row;
        }
        delta.resize(subsets.len(), Vec::new());
        Dfa {
            alphabet: nfa.alphabet.clone(),
            initial: 0,
            accepting: subsets
                .iter()
                .map(|s| s.iter().any(|&q| nfa.accepting[q]))
                .collect(),
            delta,
        }
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut q = self.initial;
        for w in word {
            match self
                .alphabet
                .binary_search_by(|s| s.as_str().cmp(w.as_ref()))
            {
                Ok(sym) => q = self.delta[q][sym],
                Err(_) => return false,
            }
        }
        self.accepting[q]
    }
}

/// Acceptor for `L(a) \ L(b)`: `a` kept nondeterministic, in product with
/// the complemented determinization of `b`, over the union alphabet.
#[derive(Debug, Clone)]
pub struct DifferenceAutomaton {
    pub product: Nfa,
    /// product state -> (state of `a`, state of complemented `b`)
    pub pairs: Vec<(usize, usize)>,
    pub complement: Dfa,
}

impl DifferenceAutomaton {
    pub fn is_empty(&self) -> bool {
        self.product.is_empty()
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        self.product.accepts(word)
    }
}

pub fn difference_automaton(a: &Nfa, b: &Nfa) -> DifferenceAutomaton {
    let alphabet: Vec<String> = a
        .alphabet
        .iter()
        .chain(&b.alphabet)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let a = a.over_alphabet(&alphabet);
    let complement = Dfa::determinize(&b.over_alphabet(&alphabet)).complement();

    let mut product = Nfa::new(alphabet, 0, 0);
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let accepting = |(qa, qb): (usize, usize)| a.accepting[qa] && complement.accepting[qb];
    let mut intern =
        |p: (usize, usize), product: &mut Nfa, pairs: &mut Vec<(usize, usize)>| -> usize {
            *index.entry(p).or_insert_with(|| {
                pairs.push(p);
                product.add_state(accepting(p))
            })
        };
    product.initial = intern((a.initial, complement.initial), &mut product, &mut pairs);
    let mut next = 0;
    while next < pairs.len() {
        let (qa, qb) = pairs[next];
        for &(label, ra) in &a.transitions[qa] {
            let rb = label.map_or(qb, |sym| complement.delta[qb][sym]);
            let to = intern((ra, rb), &mut product, &mut pairs);
            product.transitions[next].push((label, to));
        }
        next += 1;
    }
    DifferenceAutomaton {
        product,
        pairs,
        complement,
    }
}
