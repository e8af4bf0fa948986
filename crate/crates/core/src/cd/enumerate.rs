use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ast::ClassDiagram;
use super::object_model::{Link, ObjectModel};

/// The class and association names object models range over, usually the
/// union of two compared diagrams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    classes: Vec<String>,
    extends: BTreeSet<(String, String)>,
    /// association name -> possible (left, right) endpoint classes
    associations: BTreeMap<String, BTreeSet<(String, String)>>,
    prefixes: Vec<String>,
}

impl Universe {
    pub fn new(
        classes: impl IntoIterator<Item = String>,
        extends: impl IntoIterator<Item = (String, String)>,
        associations: impl IntoIterator<Item = (String, (String, String))>,
    ) -> Self {
        let classes: Vec<String> = classes
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut assocs: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
        for (name, ends) in associations {
            assocs.entry(name).or_default().insert(ends);
        }
        let prefixes = object_prefixes(&classes);
        Universe {
            classes,
            extends: extends.into_iter().collect(),
            associations: assocs,
            prefixes,
        }
    }

    pub fn of(cd: &ClassDiagram) -> Self {
        Self::joint_of([cd])
    }

    /// Union of the names of both diagrams.
    pub fn joint(a: &ClassDiagram, b: &ClassDiagram) -> Self {
        Self::joint_of([a, b])
    }

    fn joint_of<'a>(cds: impl IntoIterator<Item = &'a ClassDiagram> + Clone) -> Self {
        let classes = cds
            .clone()
            .into_iter()
            .flat_map(|cd| cd.classes.keys().cloned());
        let extends = cds.clone().into_iter().flat_map(|cd| {
            cd.extends()
                .map(|(c, p)| (c.to_string(), p.to_string()))
                .collect::<Vec<_>>()
        });
        let assocs = cds.into_iter().flat_map(|cd| {
            cd.associations
                .values()
                .map(|a| (a.name.clone(), (a.left.clone(), a.right.clone())))
                .collect::<Vec<_>>()
        });
        Self::new(classes, extends, assocs)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes
            .binary_search_by(|c| c.as_str().cmp(class))
            .ok()
    }

    pub fn association_names(&self) -> impl Iterator<Item = &str> {
        self.associations.keys().map(String::as_str)
    }

    /// Canonical id of the `i`-th (1-based) object of class number `class`.
    pub fn object_id(&self, class: usize, i: usize) -> String {
        format!("{}{i}", self.prefixes[class])
    }

    fn is_sub(&self, sub: &str, sup: &str) -> bool {
        let mut seen = BTreeSet::new();
        let mut todo = vec![sub];
        while let Some(c) = todo.pop() {
            if c == sup {
                return true;
            }
            if seen.insert(c) {
                todo.extend(
                    self.extends
                        .iter()
                        .filter(|(ch, _)| ch == c)
                        .map(|(_, p)| p.as_str()),
                );
            }
        }
        false
    }

    /// Whether a link of `assoc` from a `src` object to a `dst` object is
    /// type-plausible under some declared endpoint pair.
    pub fn compatible(&self, assoc: &str, src: &str, dst: &str) -> bool {
        self.associations.get(assoc).is_some_and(|ends| {
            ends.iter()
                .any(|(l, r)| self.is_sub(src, l) && self.is_sub(dst, r))
        })
    }
}

/// Lower-cased class names (`Employee` -> `employee1`), unless two of them
/// could produce the same id, in which case `Employee_1`.
fn object_prefixes(classes: &[String]) -> Vec<String> {
    let lower: Vec<String> = classes
        .iter()
        .map(|c| {
            let mut ch = c.chars();
            match ch.next() {
                Some(f) => f.to_ascii_lowercase().to_string() + ch.as_str(),
                None => String::new(),
            }
        })
        .collect();
    let ambiguous = lower.iter().enumerate().any(|(i, p)| {
        lower.iter().enumerate().any(|(j, q)| {
            i != j && q.starts_with(p.as_str()) && q[p.len()..].chars().all(|c| c.is_ascii_digit())
        })
    });
    if ambiguous {
        classes.iter().map(|c| format!("{c}_")).collect()
    } else {
        lower
    }
}

/// Every labelled object model over `universe` with at most `k` objects per
/// class, in order of total object count then canonical text.
///
/// This is the brute-force reference: no pruning, links range over every
/// subset of type-plausible pairs. Only usable on tiny universes.
pub fn enumerate_object_models(universe: &Universe, k: usize) -> ObjectModels<'_> {
    ObjectModels {
        universe,
        k,
        level: 0,
        buf: VecDeque::new(),
    }
}

pub struct ObjectModels<'u> {
    universe: &'u Universe,
    k: usize,
    level: usize,
    buf: VecDeque<ObjectModel>,
}

impl ObjectModels<'_> {
    fn fill_level(&mut self, n: usize) {
        let u = self.universe;
        let mut level = Vec::new();
        for counts in count_vectors(u.classes.len(), self.k, n) {
            let mut om = ObjectModel::new("om");
            for (ci, &cnt) in counts.iter().enumerate() {
                for i in 1..=cnt {
                    om.objects.insert(u.object_id(ci, i), u.classes[ci].clone());
                }
            }
            let mut pairs = Vec::new();
            for assoc in u.associations.keys() {
                for (s, sc) in &om.objects {
                    for (d, dc) in &om.objects {
                        if u.compatible(assoc, sc, dc) {
                            pairs.push(Link::new(assoc.clone(), s.clone(), d.clone()));
                        }
                    }
                }
            }
            assert!(
                pairs.len() < 64,
                "universe too large for brute-force enumeration"
            );
            for mask in 0..(1u64 << pairs.len()) {
                let mut m = om.clone();
                m.links = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, l)| l.clone())
                    .collect();
                level.push(m);
            }
        }
        level.sort_by_cached_key(ObjectModel::canonical_body);
        self.buf.extend(level);
    }
}

impl Iterator for ObjectModels<'_> {
    type Item = ObjectModel;

    fn next(&mut self) -> Option<ObjectModel> {
        let max_level = self.k * self.universe.classes.len();
        while self.buf.is_empty() && self.level <= max_level {
            let n = self.level;
            self.level += 1;
            self.fill_level(n);
        }
        self.buf.pop_front()
    }
}

/// All vectors of `len` entries in `0..=k` summing to `total`, lexicographic.
pub(crate) fn count_vectors(len: usize, k: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let slots = len - cur.len() - 1;
        for c in 0..=k.min(left) {
            if left - c <= slots * k {
                cur.push(c);
                go(len, k, left - c, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(len, k, total, &mut Vec::new(), &mut out);
    out
}
