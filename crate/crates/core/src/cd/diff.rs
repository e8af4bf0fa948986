use std::collections::BTreeMap;

use super::ast::{ClassDiagram, Modifier, Multiplicity};
use super::enumerate::{count_vectors, Universe};
use super::object_model::{Link, ObjectModel};
use crate::verdict::{Verdict, VerdictValue};

/// Output of bounded class-diagram differencing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdDiffResult {
    /// Smallest witnesses first, named `w1`, `w2`, ...
    pub witnesses: Vec<ObjectModel>,
    /// True if the whole space within `bound` was searched, so the list is
    /// complete; false if it was cut at `requested`.
    pub exhausted: bool,
    pub bound: usize,
    pub requested: usize,
}

impl CdDiffResult {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Object models with at most `k` instances per class that instantiate
/// `cd1` but not `cd2`, over the joint universe of both diagrams.
///
/// For a fixed set of objects the associations are independent, so each one
/// gets the list of link sets `cd1` admits, flagged by whether `cd2` rejects
/// them. A model is then a choice of one set per association, and it is a
/// witness if the objects alone break `cd2` or some chosen set does. The
/// choices are walked in canonical order, skipping every branch that holds
/// no witness, so the search stops after the first `max_witnesses + 1` hits
/// however large the space of `cd1` instances is. Object naming is
/// prefix-closed, which removes most of the relabelling symmetry.
pub fn cddiff(
    cd1: &ClassDiagram,
    cd2: &ClassDiagram,
    k: usize,
    max_witnesses: usize,
) -> CdDiffResult {
    let universe = Universe::joint(cd1, cd2);
    let first = Compiled::new(cd1, &universe);
    let second = Compiled::new(cd2, &universe);
    let wanted = max_witnesses.saturating_add(1);
    let mut found: Vec<ObjectModel> = Vec::new();

    for level in 0..=k * universe.classes().len() {
        let mut best: BTreeMap<String, ObjectModel> = BTreeMap::new();
        let room = wanted - found.len();
        for counts in count_vectors(universe.classes().len(), k, level) {
            if !first.admits_counts(&counts) {
                continue;
            }
            let objects: Vec<usize> = counts
                .iter()
                .enumerate()
                .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
                .collect();
            let ids: Vec<String> = counts
                .iter()
                .enumerate()
                .flat_map(|(c, &n)| (1..=n).map(move |i| (c, i)))
                .map(|(c, i)| universe.object_id(c, i))
                .collect();
            let space = Space::new(&first, &second, &objects, &ids);
            for links in space.smallest(room) {
                let om = build_model(&universe, &counts, &links, &first.assoc_names);
                best.insert(om.canonical_body(), om);
            }
            while best.len() > room {
                best.pop_last();
            }
        }
        found.extend(best.into_values());
        if found.len() >= wanted {
            break;
        }
    }

    let exhausted = found.len() <= max_witnesses;
    found.truncate(max_witnesses);
    for (i, w) in found.iter_mut().enumerate() {
        w.name = format!("w{}", i + 1);
    }
    CdDiffResult {
        witnesses: found,
        exhausted,
        bound: k,
        requested: max_witnesses,
    }
}

/// Four-valued comparison, valid up to `k` instances per class.
pub fn compare_cd(cd1: &ClassDiagram, cd2: &ClassDiagram, k: usize) -> Verdict {
    let forward = cddiff(cd1, cd2, k, 1);
    let backward = cddiff(cd2, cd1, k, 1);
    Verdict::bounded_by(
        VerdictValue::from_emptiness(forward.is_empty(), backward.is_empty()),
        k,
    )
}

fn build_model(
    u: &Universe,
    counts: &[usize],
    links: &[Vec<(usize, usize)>],
    assoc_names: &[String],
) -> ObjectModel {
    let mut ids = Vec::new();
    let mut om = ObjectModel::new("om");
    for (c, &n) in counts.iter().enumerate() {
        for i in 1..=n {
            let id = u.object_id(c, i);
            om.objects.insert(id.clone(), u.classes()[c].clone());
            ids.push(id);
        }
    }
    for (a, pairs) in links.iter().enumerate() {
        for &(s, d) in pairs {
            om.links.insert(Link::new(
                assoc_names[a].clone(),
                ids[s].clone(),
                ids[d].clone(),
            ));
        }
    }
    om
}

/// A diagram's constraints indexed by the positions of a universe.
struct Compiled {
    instantiable: Vec<bool>,
    /// for each singleton: which universe classes count towards it
    singletons: Vec<Vec<bool>>,
    /// indexed like `Universe::association_names`; None if undeclared here
    assocs: Vec<Option<CompiledAssoc>>,
    assoc_names: Vec<String>,
}

struct CompiledAssoc {
    left: Vec<bool>,
    right: Vec<bool>,
    left_mult: Multiplicity,
    right_mult: Multiplicity,
}

impl Compiled {
    fn new(cd: &ClassDiagram, u: &Universe) -> Self {
        let closure = |sup: &str| -> Vec<bool> {
            u.classes()
                .iter()
                .map(|c| cd.classes.contains_key(c) && cd.is_subtype(c, sup))
                .collect()
        };
        let instantiable = u
            .classes()
            .iter()
            .map(|c| {
                cd.class(c)
                    .is_some_and(|d| d.modifier != Modifier::Abstract)
            })
            .collect();
        let singletons = cd
            .classes
            .values()
            .filter(|c| c.modifier == Modifier::Singleton)
            .map(|c| closure(&c.name))
            .collect();
        let assoc_names: Vec<String> = u.association_names().map(str::to_string).collect();
        let assocs = assoc_names
            .iter()
            .map(|name| {
                cd.associations.get(name).map(|a| CompiledAssoc {
                    left: closure(&a.left),
                    right: closure(&a.right),
                    left_mult: a.left_mult,
                    right_mult: a.right_mult,
                })
            })
            .collect();
        Compiled {
            instantiable,
            singletons,
            assocs,
            assoc_names,
        }
    }

    fn admits_counts(&self, counts: &[usize]) -> bool {
        counts
            .iter()
            .zip(&self.instantiable)
            .all(|(&n, &ok)| n == 0 || ok)
            && self.singletons.iter().all(|members| {
                counts
                    .iter()
                    .zip(members)
                    .filter(|(_, &m)| m)
                    .map(|(&n, _)| n)
                    .sum::<usize>()
                    == 1
            })
    }

    fn objects_admitted(&self, objects: &[usize]) -> bool {
        objects.iter().all(|&c| self.instantiable[c])
            && self
                .singletons
                .iter()
                .all(|members| objects.iter().filter(|&&c| members[c]).count() == 1)
    }

    /// Whether the links of association `a` satisfy this diagram, given
    /// that `objects[i]` is the universe class of object `i`.
    fn assoc_admits(&self, a: usize, objects: &[usize], pairs: &[(usize, usize)]) -> bool {
        let Some(assoc) = &self.assocs[a] else {
            return pairs.is_empty();
        };
        let mut out_deg = vec![0usize; objects.len()];
        let mut in_deg = vec![0usize; objects.len()];
        for &(s, d) in pairs {
            if !assoc.left[objects[s]] || !assoc.right[objects[d]] {
                return false;
            }
            out_deg[s] += 1;
            in_deg[d] += 1;
        }
        objects.iter().enumerate().all(|(o, &c)| {
            (!assoc.left[c] || assoc.right_mult.admits(out_deg[o]))
                && (!assoc.right[c] || assoc.left_mult.admits(in_deg[o]))
        })
    }
}

/// The link sets one association can take in the first diagram.
struct AssocSpace {
    /// possible links, sorted by the ids of their ends
    cand: Vec<(usize, usize)>,
    /// admissible sets as increasing indices into `cand`, in lexicographic
    /// order, which is also the canonical order of the printed links
    sets: Vec<Vec<u16>>,
    /// `bad_before[i]` counts the sets in `sets[..i]` the second diagram rejects
    bad_before: Vec<usize>,
}

impl AssocSpace {
    fn bad(&self, i: usize) -> bool {
        self.bad_before[i + 1] > self.bad_before[i]
    }

    fn any_bad(&self, lo: usize, hi: usize) -> bool {
        self.bad_before[hi] > self.bad_before[lo]
    }

    fn empty(&self) -> Option<usize> {
        self.sets.first().filter(|s| s.is_empty()).map(|_| 0)
    }

    /// The sub-range of `lo..hi` holding the sets that start with `prefix`.
    fn extending(&self, lo: usize, hi: usize, prefix: &[u16]) -> (usize, usize) {
        let slice = &self.sets[lo..hi];
        let start = slice.partition_point(|s| s.as_slice() < prefix);
        let end = slice.partition_point(|s| s.as_slice() < prefix || s.starts_with(prefix));
        (lo + start, lo + end)
    }
}

/// All instances of the first diagram over a fixed set of objects.
struct Space {
    assocs: Vec<AssocSpace>,
    objects_broken: bool,
    /// `bad_from[a]`: some association from `a` on has a rejected set
    bad_from: Vec<bool>,
    /// `nonempty_from[a]`: every association from `a` on has some set
    nonempty_from: Vec<bool>,
    /// `empty_from[a]`: every association from `a` on may stay empty
    empty_from: Vec<bool>,
}

impl Space {
    fn new(first: &Compiled, second: &Compiled, objects: &[usize], ids: &[String]) -> Self {
        let assocs: Vec<AssocSpace> = (0..first.assocs.len())
            .map(|a| {
                let Some(assoc) = &first.assocs[a] else {
                    let ok = second.assoc_admits(a, objects, &[]);
                    return AssocSpace {
                        cand: Vec::new(),
                        sets: vec![Vec::new()],
                        bad_before: vec![0, usize::from(!ok)],
                    };
                };
                let mut cand: Vec<(usize, usize)> = (0..objects.len())
                    .filter(|&s| assoc.left[objects[s]])
                    .flat_map(|s| {
                        (0..objects.len())
                            .filter(|&d| assoc.right[objects[d]])
                            .map(move |d| (s, d))
                    })
                    .collect();
                cand.sort_by(|x, y| (&ids[x.0], &ids[x.1]).cmp(&(&ids[y.0], &ids[y.1])));
                let mut index = vec![vec![u16::MAX; objects.len()]; objects.len()];
                for (i, &(s, d)) in cand.iter().enumerate() {
                    index[s][d] = i as u16;
                }
                let mut sets: Vec<Vec<u16>> = admissible_sets(assoc, objects)
                    .into_iter()
                    .map(|pairs| {
                        let mut set: Vec<u16> = pairs.iter().map(|&(s, d)| index[s][d]).collect();
                        set.sort_unstable();
                        set
                    })
                    .collect();
                sets.sort_unstable();
                let mut bad_before = vec![0];
                for set in &sets {
                    let pairs: Vec<(usize, usize)> =
                        set.iter().map(|&i| cand[i as usize]).collect();
                    let bad = !second.assoc_admits(a, objects, &pairs);
                    bad_before.push(bad_before.last().unwrap() + usize::from(bad));
                }
                AssocSpace {
                    cand,
                    sets,
                    bad_before,
                }
            })
            .collect();
        let n = assocs.len();
        let mut bad_from = vec![false; n + 1];
        let mut nonempty_from = vec![true; n + 1];
        let mut empty_from = vec![true; n + 1];
        for a in (0..n).rev() {
            let sp = &assocs[a];
            bad_from[a] = bad_from[a + 1] || sp.any_bad(0, sp.sets.len());
            nonempty_from[a] = nonempty_from[a + 1] && !sp.sets.is_empty();
            empty_from[a] = empty_from[a + 1] && sp.empty().is_some();
        }
        Space {
            assocs,
            objects_broken: !second.objects_admitted(objects),
            bad_from,
            nonempty_from,
            empty_from,
        }
    }

    /// The first `room` witnesses in canonical order, as link pairs per
    /// association.
    fn smallest(&self, room: usize) -> Vec<Vec<Vec<(usize, usize)>>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        if room == 0 {
            return Vec::new();
        }
        if self.assocs.is_empty() {
            if self.objects_broken {
                out.push(Vec::new());
            }
        } else {
            let all = self.assocs[0].sets.len();
            if self.promising(0, 0, all, self.objects_broken) {
                self.walk(
                    0,
                    0,
                    all,
                    &mut Vec::new(),
                    &mut Vec::new(),
                    self.objects_broken,
                    room,
                    &mut out,
                );
            }
        }
        out.into_iter()
            .map(|choice| {
                choice
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| {
                        self.assocs[a].sets[i]
                            .iter()
                            .map(|&c| self.assocs[a].cand[c as usize])
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether some witness picks a set from `lo..hi` for association `a`.
    fn promising(&self, a: usize, lo: usize, hi: usize, broken: bool) -> bool {
        lo < hi
            && self.nonempty_from[a + 1]
            && (broken || self.assocs[a].any_bad(lo, hi) || self.bad_from[a + 1])
    }

    /// Visits, in canonical order, the models whose links start with the
    /// sets in `fixed` followed by `prefix` for association `a`. The sets
    /// of `a` that extend `prefix` are `lo..hi`.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        a: usize,
        lo: usize,
        hi: usize,
        prefix: &mut Vec<u16>,
        fixed: &mut Vec<usize>,
        broken: bool,
        room: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = self.assocs.len();
        let sp = &self.assocs[a];
        let exact = sp.sets[lo].len() == prefix.len();
        if exact && self.empty_from[a + 1] {
            let rest_bad = (a + 1..n).any(|j| self.assocs[j].bad(0));
            if broken || sp.bad(lo) || rest_bad {
                let mut choice = fixed.clone();
                choice.push(lo);
                choice.resize(n, 0);
                out.push(choice);
                if out.len() == room {
                    return;
                }
            }
        }
        let next = prefix.last().map_or(0, |&c| c as usize + 1);
        for c in next..sp.cand.len() {
            prefix.push(c as u16);
            let (l, h) = sp.extending(lo, hi, prefix);
            if self.promising(a, l, h, broken) {
                self.walk(a, l, h, prefix, fixed, broken, room, out);
            }
            prefix.pop();
            if out.len() == room {
                return;
            }
        }
        if !exact {
            return;
        }
        let mut broken = broken || sp.bad(lo);
        fixed.push(lo);
        for b in a + 1..n {
            let sb = &self.assocs[b];
            for c in 0..sb.cand.len() {
                let (l, h) = sb.extending(0, sb.sets.len(), &[c as u16]);
                if self.promising(b, l, h, broken) {
                    self.walk(b, l, h, &mut vec![c as u16], fixed, broken, room, out);
                    if out.len() == room {
                        fixed.truncate(a);
                        return;
                    }
                }
            }
            let Some(e) = sb.empty() else { break };
            broken = broken || sb.bad(e);
            fixed.push(e);
        }
        fixed.truncate(a);
    }
}

/// Link sets of one association that satisfy its endpoints and
/// multiplicities, built source by source.
fn admissible_sets(assoc: &CompiledAssoc, objects: &[usize]) -> Vec<Vec<(usize, usize)>> {
    struct Picker<'a> {
        assoc: &'a CompiledAssoc,
        sources: Vec<usize>,
        targets: Vec<usize>,
        incoming: Vec<usize>,
        current: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }

    impl Picker<'_> {
        fn source(&mut self, si: usize) {
            if si == self.sources.len() {
                let min = self.assoc.left_mult.min as usize;
                if self.targets.iter().all(|&t| self.incoming[t] >= min) {
                    self.out.push(self.current.clone());
                }
                return;
            }
            let min = self.assoc.right_mult.min as usize;
            let max = self
                .assoc
                .right_mult
                .max
                .map_or(usize::MAX, |m| m as usize)
                .min(self.targets.len());
            if min <= max {
                self.pick(si, 0, 0, min, max);
            }
        }

        fn pick(&mut self, si: usize, ti: usize, chosen: usize, min: usize, max: usize) {
            if chosen + (self.targets.len() - ti) < min {
                return;
            }
            if ti == self.targets.len() {
                self.source(si + 1);
                return;
            }
            self.pick(si, ti + 1, chosen, min, max);
            let t = self.targets[ti];
            let left_max = self.assoc.left_mult.max.map_or(usize::MAX, |m| m as usize);
            if chosen < max && self.incoming[t] < left_max {
                self.incoming[t] += 1;
                self.current.push((self.sources[si], t));
                self.pick(si, ti + 1, chosen + 1, min, max);
                self.current.pop();
                self.incoming[t] -= 1;
            }
        }
    }

    let mut picker = Picker {
        assoc,
        sources: (0..objects.len())
            .filter(|&o| assoc.left[objects[o]])
            .collect(),
        targets: (0..objects.len())
            .filter(|&o| assoc.right[objects[o]])
            .collect(),
        incoming: vec![0; objects.len()],
        current: Vec::new(),
        out: Vec::new(),
    };
    picker.source(0);
    picker.out
}
