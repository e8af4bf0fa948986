use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::syntax::{Diagnostic, DiagnosticKind, ParseError, Pos};

pub const START: &str = "start";
pub const END: &str = "end";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    /// Ordered, at least two values.
    Enum(Vec<String>),
}

impl Domain {
    /// Values in declaration order; `false` before `true`.
    pub fn values(&self) -> Vec<String> {
        match self {
            Domain::Bool => vec!["false".into(), "true".into()],
            Domain::Enum(vs) => vs.clone(),
        }
    }

    pub fn contains(&self, v: &str) -> bool {
        match self {
            Domain::Bool => v == "true" || v == "false",
            Domain::Enum(vs) => vs.iter().any(|x| x == v),
        }
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        match self {
            Domain::Bool => ["false", "true"].iter().position(|x| *x == v),
            Domain::Enum(vs) => vs.iter().position(|x| x == v),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("bool"),
            Domain::Enum(vs) => write!(f, "{{{}}}", vs.join(", ")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Input,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub domain: Domain,
    /// Required for locals, absent for inputs.
    pub initial: Option<String>,
}

impl VarDecl {
    pub fn input(name: impl Into<String>, domain: Domain) -> Self {
        VarDecl {
            name: name.into(),
            kind: VarKind::Input,
            domain,
            initial: None,
        }
    }

    pub fn local(name: impl Into<String>, domain: Domain, initial: impl Into<String>) -> Self {
        VarDecl {
            name: name.into(),
            kind: VarKind::Local,
            domain,
            initial: Some(initial.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Initial,
    Final,
    Action,
    Decision,
    Merge,
    Fork,
    Join,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Initial => "initial",
            NodeKind::Final => "final",
            NodeKind::Action => "action",
            NodeKind::Decision => "decision",
            NodeKind::Merge => "merge",
            NodeKind::Fork => "fork",
            NodeKind::Join => "join",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AssignSource {
    Value(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub target: String,
    pub source: AssignSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    /// Only actions carry assignments.
    pub assignments: Vec<Assignment>,
}

impl Node {
    pub fn new(name: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            name: name.into(),
            kind,
            assignments: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    True,
    False,
    /// A bool variable, read as `v == true`.
    Var(String),
    Eq(String, String),
    Ne(String, String),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    /// Evaluates under `lookup`, which maps a variable to its current value.
    pub fn eval<'a>(&self, lookup: &impl Fn(&str) -> Option<&'a str>) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Var(v) => lookup(v) == Some("true"),
            Guard::Eq(v, x) => lookup(v) == Some(x.as_str()),
            Guard::Ne(v, x) => lookup(v) != Some(x.as_str()),
            Guard::Not(g) => !g.eval(lookup),
            Guard::And(a, b) => a.eval(lookup) && b.eval(lookup),
            Guard::Or(a, b) => a.eval(lookup) || b.eval(lookup),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Guard::Or(..) => 0,
            Guard::And(..) => 1,
            Guard::Not(_) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Guard::True => f.write_str("true"),
            Guard::False => f.write_str("false"),
            Guard::Var(v) => f.write_str(v),
            Guard::Eq(v, x) => write!(f, "{v} == {x}"),
            Guard::Ne(v, x) => write!(f, "{v} != {x}"),
            Guard::Not(g) => {
                f.write_str("!")?;
                g.fmt_prec(f, 2)
            }
            Guard::And(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" && ")?;
                b.fmt_prec(f, 2)
            }
            Guard::Or(a, b) => {
                a.fmt_prec(f, 0)?;
                f.write_str(" || ")?;
                b.fmt_prec(f, 1)
            }
        }
    }

    fn vars<'a>(&'a self, out: &mut Vec<(&'a str, Option<&'a str>)>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Var(v) => out.push((v, None)),
            Guard::Eq(v, x) | Guard::Ne(v, x) => out.push((v, Some(x))),
            Guard::Not(g) => g.vars(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub guard: Option<Guard>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: None,
        }
    }

    pub fn guarded(source: impl Into<String>, target: impl Into<String>, guard: Guard) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: Some(guard),
        }
    }
}

/// An activity diagram. Nodes and edges keep declaration order; edges are
/// identified by their index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActivityDiagram {
    pub name: String,
    pub variables: Vec<VarDecl>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Site<'a> {
    Node(&'a str),
    Edge(usize),
    Var(&'a str),
    Diagram,
}

impl ActivityDiagram {
    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&VarDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &VarDecl> {
        self.variables.iter().filter(|v| v.kind == VarKind::Input)
    }

    /// Names of action nodes, sorted.
    pub fn action_names(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Action)
            .map(|n| n.name.as_str())
            .collect()
    }

    pub fn incoming(&self, node: &str) -> impl Iterator<Item = usize> + '_ {
        let node = node.to_string();
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.target == node)
            .map(|(i, _)| i)
    }

    pub fn outgoing(&self, node: &str) -> impl Iterator<Item = usize> + '_ {
        let node = node.to_string();
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == node)
            .map(|(i, _)| i)
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        let diags = self.check(|_| None);
        if diags.is_empty() {
            Ok(())
        } else {
            Err(ParseError { diagnostics: diags })
        }
    }

    pub(crate) fn check(&self, pos_of: impl Fn(Site<'_>) -> Option<Pos>) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let mut err =
            |site: Site<'_>, kind, msg: String| d.push(Diagnostic::new(pos_of(site), kind, msg));

        let mut var_names = BTreeSet::new();
        for v in &self.variables {
            if !var_names.insert(v.name.as_str()) {
                err(
                    Site::Var(&v.name),
                    DiagnosticKind::DuplicateName,
                    format!("variable `{}` declared twice", v.name),
                );
            }
            if let Domain::Enum(vs) = &v.domain {
                let uniq: BTreeSet<_> = vs.iter().collect();
                if uniq.len() != vs.len() || vs.len() < 2 {
                    err(
                        Site::Var(&v.name),
                        DiagnosticKind::Type,
                        format!("domain of `{}` needs at least two distinct values", v.name),
                    );
                }
            }
            match (v.kind, &v.initial) {
                (VarKind::Local, None) => err(
                    Site::Var(&v.name),
                    DiagnosticKind::Type,
                    format!("local `{}` needs an initial value", v.name),
                ),
                (VarKind::Input, Some(_)) => err(
                    Site::Var(&v.name),
                    DiagnosticKind::Type,
                    format!("input `{}` cannot have an initial value", v.name),
                ),
                (_, Some(x)) if !v.domain.contains(x) => err(
                    Site::Var(&v.name),
                    DiagnosticKind::Type,
                    format!("initial value `{x}` is not in the domain of `{}`", v.name),
                ),
                _ => {}
            }
        }

        let mut index: HashMap<&str, &Node> = HashMap::new();
        for n in &self.nodes {
            if index.insert(n.name.as_str(), n).is_some() {
                err(
                    Site::Node(&n.name),
                    DiagnosticKind::DuplicateName,
                    format!("node `{}` declared twice", n.name),
                );
            }
            if n.kind != NodeKind::Action && !n.assignments.is_empty() {
                err(
                    Site::Node(&n.name),
                    DiagnosticKind::Type,
                    format!("only actions may assign (`{}`)", n.name),
                );
            }
            for a in &n.assignments {
                let Some(target) = self.variable(&a.target) else {
                    err(
                        Site::Node(&n.name),
                        DiagnosticKind::UnknownName,
                        format!("`{}` assigns undeclared variable `{}`", n.name, a.target),
                    );
                    continue;
                };
                match &a.source {
                    AssignSource::Value(x) if !target.domain.contains(x) => err(
                        Site::Node(&n.name),
                        DiagnosticKind::Type,
                        format!("`{x}` is not a value of `{}`", a.target),
                    ),
                    AssignSource::Var(s) => match self.variable(s) {
                        Some(src) if src.domain == target.domain => {}
                        Some(_) => err(
                            Site::Node(&n.name),
                            DiagnosticKind::Type,
                            format!("`{}` and `{s}` have different domains", a.target),
                        ),
                        None => err(
                            Site::Node(&n.name),
                            DiagnosticKind::UnknownName,
                            format!("unknown variable `{s}`"),
                        ),
                    },
                    _ => {}
                }
            }
        }

        let initials: Vec<_> = self
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Initial)
            .collect();
        if initials.len() != 1 {
            let site = initials
                .get(1)
                .map_or(Site::Diagram, |n| Site::Node(&n.name));
            err(
                site,
                DiagnosticKind::InitialCount,
                format!("expected one initial node, found {}", initials.len()),
            );
        }
        if !self.nodes.iter().any(|n| n.kind == NodeKind::Final) {
            err(
                Site::Diagram,
                DiagnosticKind::FinalCount,
                "no edge reaches a final node".into(),
            );
        }

        let mut edges_ok = true;
        for (i, e) in self.edges.iter().enumerate() {
            for end in [&e.source, &e.target] {
                if !index.contains_key(end.as_str()) {
                    edges_ok = false;
                    err(
                        Site::Edge(i),
                        DiagnosticKind::UnknownName,
                        format!("unknown node `{end}`"),
                    );
                }
            }
            let from_decision = index
                .get(e.source.as_str())
                .is_some_and(|n| n.kind == NodeKind::Decision);
            match &e.guard {
                Some(g) => {
                    if !from_decision {
                        err(
                            Site::Edge(i),
                            DiagnosticKind::MisplacedGuard,
                            format!("guard on edge from non-decision `{}`", e.source),
                        );
                    }
                    let mut used = Vec::new();
                    g.vars(&mut used);
                    for (v, value) in used {
                        match (self.variable(v), value) {
                            (None, _) => err(
                                Site::Edge(i),
                                DiagnosticKind::UnknownName,
                                format!("guard uses undeclared variable `{v}`"),
                            ),
                            (Some(decl), None) if decl.domain != Domain::Bool => err(
                                Site::Edge(i),
                                DiagnosticKind::Type,
                                format!("`{v}` is not bool; compare it with `==`"),
                            ),
                            (Some(decl), Some(x)) if !decl.domain.contains(x) => err(
                                Site::Edge(i),
                                DiagnosticKind::Type,
                                format!("`{x}` is not a value of `{v}`"),
                            ),
                            _ => {}
                        }
                    }
                }
                None if from_decision => err(
                    Site::Edge(i),
                    DiagnosticKind::MissingGuard,
                    format!(
                        "edge {} -> {} leaves a decision without a guard",
                        e.source, e.target
                    ),
                ),
                None => {}
            }
        }

        for n in &self.nodes {
            let ins = self.incoming(&n.name).count();
            let outs = self.outgoing(&n.name).count();
            let ok = match n.kind {
                NodeKind::Initial => ins == 0 && outs == 1,
                NodeKind::Final => outs == 0 && ins >= 1,
                NodeKind::Action | NodeKind::Merge => outs == 1,
                NodeKind::Decision => ins == 1 && outs >= 2,
                NodeKind::Fork => ins == 1 && outs >= 2,
                NodeKind::Join => ins >= 2 && outs == 1,
            };
            if !ok {
                let want = match n.kind {
                    NodeKind::Initial => "no incoming and one outgoing edge",
                    NodeKind::Final => "at least one incoming and no outgoing edge",
                    NodeKind::Action | NodeKind::Merge => "exactly one outgoing edge",
                    NodeKind::Decision | NodeKind::Fork => {
                        "one incoming and at least two outgoing edges"
                    }
                    NodeKind::Join => "at least two incoming and one outgoing edge",
                };
                err(
                    Site::Node(&n.name),
                    DiagnosticKind::Degree,
                    format!(
                        "{} `{}` has {ins} in / {outs} out; needs {want}",
                        n.kind, n.name
                    ),
                );
            }
        }

        if edges_ok && initials.len() == 1 {
            let mut seen = BTreeSet::from([initials[0].name.as_str()]);
            let mut todo = VecDeque::from([initials[0].name.as_str()]);
            while let Some(x) = todo.pop_front() {
                for e in self.edges.iter().filter(|e| e.source == x) {
                    if seen.insert(e.target.as_str()) {
                        todo.push_back(&e.target);
                    }
                }
            }
            for n in &self.nodes {
                if !seen.contains(n.name.as_str()) {
                    err(
                        Site::Node(&n.name),
                        DiagnosticKind::Unreachable,
                        format!("`{}` is unreachable from start", n.name),
                    );
                }
            }
        }
        d
    }
}

impl fmt::Display for ActivityDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "activity {} {{", self.name)?;
        for v in &self.variables {
            let kw = if v.kind == VarKind::Input {
                "input"
            } else {
                "local"
            };
            write!(f, "  {kw} {}: {}", v.name, v.domain)?;
            if let Some(x) = &v.initial {
                write!(f, " = {x}")?;
            }
            writeln!(f, ";")?;
        }
        for n in &self.nodes {
            let kw = match n.kind {
                NodeKind::Initial => continue,
                NodeKind::Final if n.name == END => continue,
                other => other.to_string(),
            };
            write!(f, "  {kw} {}", n.name)?;
            for (i, a) in n.assignments.iter().enumerate() {
                f.write_str(if i == 0 { " / " } else { ", " })?;
                let src = match &a.source {
                    AssignSource::Value(x) | AssignSource::Var(x) => x,
                };
                write!(f, "{} := {src}", a.target)?;
            }
            writeln!(f, ";")?;
        }
        for e in &self.edges {
            match &e.guard {
                Some(g) => writeln!(f, "  {} -[{g}]-> {};", e.source, e.target)?,
                None => writeln!(f, "  {} -> {};", e.source, e.target)?,
            }
        }
        f.write_str("}\n")
    }
}
