use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Diagnostic, DiagnosticKind, ParseError, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Modifier {
    #[default]
    Concrete,
    Abstract,
    Singleton,
}

/// Interval bound on the number of links at one association end.
/// `max == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multiplicity {
    pub min: u32,
    pub max: Option<u32>,
}

impl Multiplicity {
    pub const MANY: Multiplicity = Multiplicity { min: 0, max: None };

    pub fn exactly(n: u32) -> Self {
        Multiplicity {
            min: n,
            max: Some(n),
        }
    }

    pub fn range(min: u32, max: Option<u32>) -> Self {
        Multiplicity { min, max }
    }

    pub fn admits(&self, n: usize) -> bool {
        n >= self.min as usize && self.max.is_none_or(|m| n <= m as usize)
    }
}

impl Default for Multiplicity {
    fn default() -> Self {
        Multiplicity::MANY
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.min, self.max) {
            (0, None) => f.write_str("*"),
            (n, None) => write!(f, "{n}..*"),
            (n, Some(m)) if n == m => write!(f, "{n}"),
            (n, Some(m)) => write!(f, "{n}..{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    pub modifier: Modifier,
    pub parent: Option<String>,
}

impl ClassDecl {
    pub fn new(name: impl Into<String>) -> Self {
        ClassDecl {
            name: name.into(),
            modifier: Modifier::Concrete,
            parent: None,
        }
    }

    pub fn with_modifier(mut self, modifier: Modifier) -> Self {
        self.modifier = modifier;
        self
    }

    pub fn extending(mut self, parent: impl Into<String>) -> Self {
        self.parent = Some(parent.into());
        self
    }
}

/// A named binary association `name [left_mult] left -- right [right_mult]`.
///
/// `right_mult` bounds how many `right` objects each `left` object links to;
/// `left_mult` bounds how many `left` objects each `right` object is linked from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Association {
    pub name: String,
    pub left: String,
    pub left_mult: Multiplicity,
    pub right: String,
    pub right_mult: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassDiagram {
    pub name: String,
    pub classes: BTreeMap<String, ClassDecl>,
    pub associations: BTreeMap<String, Association>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown class `{0}`")]
pub struct UnknownClass(pub String);

/// Where a validation problem sits in the source, if it came from text.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Site<'a> {
    Parent(&'a str),
    AssocLeft(&'a str),
    AssocRight(&'a str),
    LeftMult(&'a str),
    RightMult(&'a str),
}

impl ClassDiagram {
    pub fn new(name: impl Into<String>) -> Self {
        ClassDiagram {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_class(mut self, class: ClassDecl) -> Self {
        self.classes.insert(class.name.clone(), class);
        self
    }

    pub fn with_association(mut self, assoc: Association) -> Self {
        self.associations.insert(assoc.name.clone(), assoc);
        self
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name)
    }

    /// `(child, parent)` pairs of the inheritance relation.
    pub fn extends(&self) -> impl Iterator<Item = (&str, &str)> {
        self.classes
            .values()
            .filter_map(|c| c.parent.as_deref().map(|p| (c.name.as_str(), p)))
    }

    /// Reflexive-transitive subclasses of `class`.
    pub fn subtype_set(&self, class: &str) -> Result<BTreeSet<String>, UnknownClass> {
        if !self.classes.contains_key(class) {
            return Err(UnknownClass(class.to_string()));
        }
        Ok(self
            .classes
            .keys()
            .filter(|c| self.is_subtype(c, class))
            .cloned()
            .collect())
    }

    /// True if `sub` equals `sup` or reaches it along `extends`.
    /// Terminates on cyclic input.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub);
        let mut steps = 0;
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            steps += 1;
            if steps > self.classes.len() {
                return false;
            }
            cur = self.classes.get(c).and_then(|d| d.parent.as_deref());
        }
        false
    }

    /// Checks every well-formedness rule except name uniqueness, which the
    /// map representation already guarantees.
    pub fn validate(&self) -> Result<(), ParseError> {
        let diags = self.check(|_| None);
        if diags.is_empty() {
            Ok(())
        } else {
            Err(ParseError { diagnostics: diags })
        }
    }

    pub(crate) fn check(&self, pos_of: impl Fn(Site<'_>) -> Option<Pos>) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for c in self.classes.values() {
            if let Some(p) = &c.parent {
                if !self.classes.contains_key(p) {
                    diags.push(Diagnostic::new(
                        pos_of(Site::Parent(&c.name)),
                        DiagnosticKind::UnknownName,
                        format!("class `{}` extends unknown class `{p}`", c.name),
                    ));
                }
            }
        }
        let mut reported = BTreeSet::new();
        for c in self.classes.values() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(c.name.as_str());
            while let Some(x) = cur {
                if !seen.insert(x) {
                    // x lies on the cycle; report once at its smallest member
                    let cycle = self.cycle_through(x);
                    let first = cycle.iter().min().cloned().unwrap_or_default();
                    if reported.insert(first.clone()) {
                        diags.push(Diagnostic::new(
                            pos_of(Site::Parent(&first)),
                            DiagnosticKind::InheritanceCycle,
                            format!("inheritance cycle: {}", cycle.join(" -> ")),
                        ));
                    }
                    break;
                }
                cur = self.classes.get(x).and_then(|d| d.parent.as_deref());
            }
        }
        for a in self.associations.values() {
            for (class, site) in [
                (&a.left, Site::AssocLeft(&a.name)),
                (&a.right, Site::AssocRight(&a.name)),
            ] {
                if !self.classes.contains_key(class) {
                    diags.push(Diagnostic::new(
                        pos_of(site),
                        DiagnosticKind::UnknownName,
                        format!("association `{}` refers to unknown class `{class}`", a.name),
                    ));
                }
            }
            for (m, site) in [
                (a.left_mult, Site::LeftMult(&a.name)),
                (a.right_mult, Site::RightMult(&a.name)),
            ] {
                if m.max.is_some_and(|max| m.min > max) {
                    diags.push(Diagnostic::new(
                        pos_of(site),
                        DiagnosticKind::BadMultiplicity,
                        format!(
                            "multiplicity {}..{} has min > max",
                            m.min,
                            m.max.unwrap_or(0)
                        ),
                    ));
                }
            }
        }
        diags
    }

    fn cycle_through(&self, start: &str) -> Vec<String> {
        let mut cycle = vec![start.to_string()];
        let mut cur = self.classes.get(start).and_then(|d| d.parent.as_deref());
        while let Some(c) = cur {
            if c == start {
                break;
            }
            cycle.push(c.to_string());
            cur = self.classes.get(c).and_then(|d| d.parent.as_deref());
        }
        cycle.push(start.to_string());
        cycle
    }
}

impl fmt::Display for ClassDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classdiagram {} {{", self.name)?;
        for c in self.classes.values() {
            f.write_str("  ")?;
            match c.modifier {
                Modifier::Concrete => {}
                Modifier::Abstract => f.write_str("abstract ")?,
                Modifier::Singleton => f.write_str("singleton ")?,
            }
            write!(f, "class {}", c.name)?;
            if let Some(p) = &c.parent {
                write!(f, " extends {p}")?;
            }
            writeln!(f, ";")?;
        }
        for a in self.associations.values() {
            writeln!(
                f,
                "  association {} [{}] {} -- {} [{}];",
                a.name, a.left_mult, a.left, a.right, a.right_mult
            )?;
        }
        f.write_str("}\n")
    }
}
