use rand::seq::{IndexedMutRandom, IndexedRandom};
use rand::Rng;

use semdiff_core::ad::{parse_ad, ActivityDiagram};
use semdiff_core::automata::Nfa;
use semdiff_core::cd::{Association, ClassDecl, ClassDiagram, Modifier, Multiplicity};

use crate::oracle::link_space;
use crate::TestRng;

const CLASS_POOL: &[&str] = &["A", "B", "C"];
const ASSOC_POOL: &[&str] = &["r", "s"];

fn multiplicity(rng: &mut TestRng) -> Multiplicity {
    *[
        Multiplicity::MANY,
        Multiplicity::MANY,
        Multiplicity::exactly(1),
        Multiplicity::range(0, Some(1)),
        Multiplicity::range(1, None),
        Multiplicity::range(1, Some(2)),
        Multiplicity::exactly(2),
    ]
    .choose(rng)
    .unwrap()
}

/// A valid class diagram over (a subset of) classes `A`, `B`, `C` with at
/// most two associations named `r` and `s`.
pub fn random_cd(rng: &mut TestRng, name: &str) -> ClassDiagram {
    let n = rng.random_range(1..=CLASS_POOL.len());
    let classes: Vec<&str> = CLASS_POOL.choose_multiple(rng, n).copied().collect();
    let mut cd = ClassDiagram::new(name);
    for (i, c) in classes.iter().enumerate() {
        let modifier = match rng.random_range(0..6) {
            0 => Modifier::Abstract,
            1 => Modifier::Singleton,
            _ => Modifier::Concrete,
        };
        let mut decl = ClassDecl::new(*c).with_modifier(modifier);
        // Parents are drawn from earlier classes only, so there is no cycle.
        if i > 0 && rng.random_bool(0.3) {
            decl = decl.extending(classes[rng.random_range(0..i)]);
        }
        cd = cd.with_class(decl);
    }
    for a in ASSOC_POOL.iter().take(rng.random_range(0..=2)) {
        cd = cd.with_association(Association {
            name: a.to_string(),
            left: classes.choose(rng).unwrap().to_string(),
            left_mult: multiplicity(rng),
            right: classes.choose(rng).unwrap().to_string(),
            right_mult: multiplicity(rng),
        });
    }
    cd.validate().expect("generated diagram is valid");
    cd
}

/// Either an independent second diagram or a small edit of the first.
fn variant(rng: &mut TestRng, cd: &ClassDiagram) -> ClassDiagram {
    let mut out = cd.clone();
    out.name = "right".into();
    match rng.random_range(0..5) {
        0 => {
            if let Some(c) = out.classes.values_mut().collect::<Vec<_>>().choose_mut(rng) {
                c.modifier = *[Modifier::Concrete, Modifier::Abstract, Modifier::Singleton]
                    .choose(rng)
                    .unwrap();
            }
        }
        1 => {
            if let Some(a) = out
                .associations
                .values_mut()
                .collect::<Vec<_>>()
                .choose_mut(rng)
            {
                if rng.random_bool(0.5) {
                    a.left_mult = multiplicity(rng);
                } else {
                    a.right_mult = multiplicity(rng);
                }
            }
        }
        2 => {
            let parents: Vec<String> = out.classes.keys().cloned().collect();
            if let Some(c) = out.classes.values_mut().collect::<Vec<_>>().choose_mut(rng) {
                c.parent = match parents
                    .iter()
                    .filter(|p| **p < c.name)
                    .collect::<Vec<_>>()
                    .choose(rng)
                {
                    Some(p) if c.parent.is_none() => Some(p.to_string()),
                    _ => None,
                };
            }
        }
        3 => return random_cd(rng, "right"),
        _ => {}
    }
    if out.validate().is_ok() {
        out
    } else {
        random_cd(rng, "right")
    }
}

/// A pair of diagrams and a bound `k <= 2` whose brute-force object-model
/// space stays small enough to enumerate exhaustively.
pub fn random_cd_pair(rng: &mut TestRng) -> (ClassDiagram, ClassDiagram, usize) {
    loop {
        let left = random_cd(rng, "left");
        let right = variant(rng, &left);
        let k = rng.random_range(1..=2);
        if link_space(&left, &right, k) <= 14 {
            return (left, right, k);
        }
    }
}

/// Structured control flow for random activity diagrams.
#[derive(Debug, Clone)]
enum Block {
    Action(usize),
    Seq(Box<Block>, Box<Block>),
    Fork(Box<Block>, Box<Block>),
    Choice(String, String, Box<Block>, Box<Block>),
    Loop(Box<Block>, String),
}

const ACTIONS: &[&str] = &["a", "b", "c", "d", "e"];

struct Shape<'r> {
    rng: &'r mut TestRng,
    unused: Vec<usize>,
    control_budget: usize,
    /// Sibling blocks still to be generated, each needing an action.
    pending: usize,
    vars: Vec<&'static str>,
}

impl Shape<'_> {
    fn guard(&mut self) -> String {
        let v = self.vars.choose(self.rng).copied();
        match (v, self.rng.random_range(0..4)) {
            (None, _) | (_, 0) => "true".into(),
            (Some(v), 1) => format!("!{v}"),
            (Some(_), 2) if self.vars.len() == 2 => {
                format!("{} && !{}", self.vars[0], self.vars[1])
            }
            (Some(v), _) => v.to_string(),
        }
    }

    fn complement(&mut self, g: &str) -> String {
        match self.rng.random_range(0..4) {
            0 => "true".into(),
            1 => self.guard(),
            _ if g == "true" => "true".into(),
            _ => format!("!({g})"),
        }
    }

    fn pair(&mut self, depth: usize) -> (Box<Block>, Box<Block>) {
        self.pending += 1;
        let first = self.block(depth + 1);
        self.pending -= 1;
        (Box::new(first), Box::new(self.block(depth + 1)))
    }

    fn block(&mut self, depth: usize) -> Block {
        let can_split =
            self.unused.len() >= 2 + self.pending && self.control_budget >= 2 && depth < 3;
        let choice = if can_split {
            self.rng.random_range(0..6)
        } else {
            0
        };
        match choice {
            1 => {
                let (x, y) = self.pair(depth);
                Block::Seq(x, y)
            }
            2 => {
                self.control_budget -= 2;
                let (x, y) = self.pair(depth);
                Block::Fork(x, y)
            }
            3 | 4 => {
                self.control_budget -= 2;
                let g = self.guard();
                let h = self.complement(&g);
                let (x, y) = self.pair(depth);
                Block::Choice(g, h, x, y)
            }
            5 => {
                self.control_budget -= 2;
                let g = self.guard();
                Block::Loop(Box::new(self.block(depth + 1)), g)
            }
            _ => {
                let i = self.rng.random_range(0..self.unused.len());
                Block::Action(self.unused.swap_remove(i))
            }
        }
    }
}

/// Emits nodes and edges for `block`; returns its entry node, exit node and
/// the guard the exit's outgoing edge must carry.
struct Emitter<'a> {
    decls: Vec<String>,
    edges: Vec<String>,
    counter: usize,
    assignments: &'a [Option<String>],
}

impl Emitter<'_> {
    fn fresh(&mut self, kind: &str, prefix: &str) -> String {
        self.counter += 1;
        let name = format!("{prefix}{}", self.counter);
        self.decls.push(format!("{kind} {name};"));
        name
    }

    fn edge(&mut self, from: &str, to: &str, guard: Option<&str>) {
        match guard {
            Some(g) => self.edges.push(format!("{from} -[{g}]-> {to};")),
            None => self.edges.push(format!("{from} -> {to};")),
        }
    }

    fn emit(&mut self, block: &Block) -> (String, String, Option<String>) {
        match block {
            Block::Action(i) => {
                let name = ACTIONS[*i].to_string();
                match &self.assignments[*i] {
                    Some(a) => self.decls.push(format!("action {name} / {a};")),
                    None => self.decls.push(format!("action {name};")),
                }
                (name.clone(), name, None)
            }
            Block::Seq(x, y) => {
                let (xi, xo, xg) = self.emit(x);
                let (yi, yo, yg) = self.emit(y);
                self.edge(&xo, &yi, xg.as_deref());
                (xi, yo, yg)
            }
            Block::Fork(x, y) => {
                let f = self.fresh("fork", "f");
                let j = self.fresh("join", "j");
                for b in [x, y] {
                    let (bi, bo, bg) = self.emit(b);
                    self.edge(&f, &bi, None);
                    self.edge(&bo, &j, bg.as_deref());
                }
                (f, j, None)
            }
            Block::Choice(g, h, x, y) => {
                let d = self.fresh("decision", "d");
                let m = self.fresh("merge", "m");
                for (b, guard) in [(x, g), (y, h)] {
                    let (bi, bo, bg) = self.emit(b);
                    self.edge(&d, &bi, Some(guard));
                    self.edge(&bo, &m, bg.as_deref());
                }
                (d, m, None)
            }
            Block::Loop(body, g) => {
                let m = self.fresh("merge", "m");
                let d = self.fresh("decision", "d");
                let (bi, bo, bg) = self.emit(body);
                self.edge(&m, &bi, None);
                self.edge(&bo, &d, bg.as_deref());
                self.edge(&d, &m, Some(g));
                let exit = if g == "true" {
                    g.clone()
                } else {
                    format!("!({g})")
                };
                (m, d, Some(exit))
            }
        }
    }
}

/// A well-formed, 1-safe activity diagram with at most ten nodes, built
/// from nested sequence, fork/join, decision/merge and loop blocks over the
/// actions `a` to `e`, with up to two boolean variables.
pub fn random_ad(rng: &mut TestRng, name: &str) -> ActivityDiagram {
    loop {
        let ad = build(&sketch(rng), name);
        if ad.nodes.len() <= 10 {
            return ad;
        }
    }
}

/// The ingredients of a random diagram before it is written out.
#[derive(Debug, Clone)]
struct Sketch {
    vars: Vec<&'static str>,
    locals: Vec<bool>,
    block: Block,
    assignments: Vec<Option<String>>,
}

fn sketch(rng: &mut TestRng) -> Sketch {
    let nvars = rng.random_range(0..=2);
    let vars: Vec<&'static str> = ["p", "q"][..nvars].to_vec();
    let locals: Vec<bool> = vars.iter().map(|_| rng.random_bool(0.4)).collect();
    let mut shape = Shape {
        rng,
        unused: (0..ACTIONS.len()).collect(),
        control_budget: 4,
        pending: 0,
        vars: vars.clone(),
    };
    let block = shape.block(0);
    let assignments = ACTIONS.iter().map(|_| assignment(rng, &vars)).collect();
    Sketch {
        vars,
        locals,
        block,
        assignments,
    }
}

fn assignment(rng: &mut TestRng, vars: &[&str]) -> Option<String> {
    if vars.is_empty() || !rng.random_bool(0.25) {
        return None;
    }
    let v = vars.choose(rng).unwrap();
    Some(match rng.random_range(0..3) {
        0 => format!("{v} := true"),
        1 => format!("{v} := false"),
        _ => format!("{v} := {}", vars.choose(rng).unwrap()),
    })
}

fn build(sk: &Sketch, name: &str) -> ActivityDiagram {
    let mut em = Emitter {
        decls: Vec::new(),
        edges: Vec::new(),
        counter: 0,
        assignments: &sk.assignments,
    };
    let (entry, exit, guard) = em.emit(&sk.block);
    em.edge("start", &entry, None);
    em.edge(&exit, "end", guard.as_deref());
    let mut text = format!("activity {name} {{\n");
    for (v, local) in sk.vars.iter().zip(&sk.locals) {
        if *local {
            text += &format!("  local {v}: bool = false;\n");
        } else {
            text += &format!("  input {v}: bool;\n");
        }
    }
    for line in em.decls.iter().chain(&em.edges) {
        text += &format!("  {line}\n");
    }
    text += "}\n";
    parse_ad(&text).unwrap_or_else(|e| panic!("generated diagram rejected: {e}\n{text}"))
}

fn count_blocks(b: &Block) -> usize {
    1 + match b {
        Block::Action(_) => 0,
        Block::Seq(x, y) | Block::Fork(x, y) | Block::Choice(_, _, x, y) => {
            count_blocks(x) + count_blocks(y)
        }
        Block::Loop(x, _) => count_blocks(x),
    }
}

/// Applies `f` to the `target`-th block in pre-order.
fn edit_block(b: &mut Block, target: &mut usize, f: &mut dyn FnMut(&mut Block)) {
    if *target == 0 {
        f(b);
        *target = usize::MAX;
        return;
    }
    *target -= 1;
    match b {
        Block::Action(_) => {}
        Block::Seq(x, y) | Block::Fork(x, y) | Block::Choice(_, _, x, y) => {
            edit_block(x, target, f);
            if *target != usize::MAX {
                edit_block(y, target, f);
            }
        }
        Block::Loop(x, _) => edit_block(x, target, f),
    }
}

/// A small change to one block or one assignment.
fn mutate(rng: &mut TestRng, sk: &Sketch) -> Sketch {
    let mut out = sk.clone();
    if rng.random_bool(0.2) {
        let i = rng.random_range(0..ACTIONS.len());
        out.assignments[i] = assignment(rng, &out.vars);
        return out;
    }
    let vars = out.vars.clone();
    let mut target = rng.random_range(0..count_blocks(&out.block));
    let choice = rng.random_range(0..3);
    let mut shape = Shape {
        rng,
        unused: Vec::new(),
        control_budget: 0,
        pending: 0,
        vars,
    };
    edit_block(&mut out.block, &mut target, &mut |b| {
        let old = std::mem::replace(b, Block::Action(0));
        *b = match (old, choice) {
            (Block::Seq(x, y), 0) => Block::Seq(y, x),
            (Block::Seq(x, y), _) => Block::Fork(x, y),
            (Block::Fork(x, y), 0) => Block::Seq(y, x),
            (Block::Fork(x, y), _) => Block::Seq(x, y),
            (Block::Choice(_, _, x, y), 0) => Block::Seq(x, y),
            (Block::Choice(g, _, x, y), 1) => {
                let h = shape.complement(&g);
                Block::Choice(g, h, x, y)
            }
            (Block::Choice(_, h, x, y), _) => Block::Choice(shape.guard(), h, x, y),
            (Block::Loop(x, _), 0) => *x,
            (Block::Loop(x, _), _) => Block::Loop(x, shape.guard()),
            (Block::Action(a), _) => Block::Loop(Box::new(Block::Action(a)), shape.guard()),
        };
    });
    out
}

/// Two diagrams: either independent ones, or one and a small edit of it.
/// Variables are boolean in both, so the pair can always be compared.
pub fn random_ad_pair(rng: &mut TestRng) -> (ActivityDiagram, ActivityDiagram) {
    loop {
        let (left, right) = if rng.random_bool(0.5) {
            let sk = sketch(rng);
            (build(&sk, "left"), build(&mutate(rng, &sk), "right"))
        } else {
            (build(&sketch(rng), "left"), build(&sketch(rng), "right"))
        };
        let clash = left
            .variables
            .iter()
            .any(|v| right.variable(&v.name).is_some_and(|w| w.kind != v.kind));
        if !clash && left.nodes.len() <= 10 && right.nodes.len() <= 10 {
            return (left, right);
        }
    }
}

/// An epsilon-NFA with 1 to 5 states over `{a, b}`.
pub fn random_nfa(rng: &mut TestRng) -> Nfa {
    let n = rng.random_range(1..=5);
    let mut nfa = Nfa::new(["a".to_string(), "b".to_string()], n, 0);
    for q in 0..n {
        nfa.accepting[q] = rng.random_bool(0.35);
        for _ in 0..rng.random_range(0..=3) {
            let label = match rng.random_range(0..5) {
                0 => None,
                1 | 2 => Some(0),
                _ => Some(1),
            };
            nfa.transitions[q].push((label, rng.random_range(0..n)));
        }
    }
    nfa
}
