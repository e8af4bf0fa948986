use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use super::parse::CD_SYMBOLS;
use crate::syntax::{lex, Cursor, Diagnostic, DiagnosticKind, ParseError, Pos, Tok};

/// A link `assoc(src, dst)` between two objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub assoc: String,
    pub src: String,
    pub dst: String,
}

impl Link {
    pub fn new(assoc: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Link {
            assoc: assoc.into(),
            src: src.into(),
            dst: dst.into(),
        }
    }
}

/// A finite object model: typed objects plus association-labelled links.
/// Class and association names are free strings; whether they mean anything
/// is decided against a particular diagram by [`super::is_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ObjectModel {
    pub name: String,
    /// object id -> class name
    pub objects: BTreeMap<String, String>,
    pub links: BTreeSet<Link>,
}

impl ObjectModel {
    pub fn new(name: impl Into<String>) -> Self {
        ObjectModel {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_object(mut self, id: impl Into<String>, class: impl Into<String>) -> Self {
        self.objects.insert(id.into(), class.into());
        self
    }

    pub fn with_link(mut self, assoc: &str, src: &str, dst: &str) -> Self {
        self.links.insert(Link::new(assoc, src, dst));
        self
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Number of objects per class (exact class, not counting subclasses).
    pub fn class_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for c in self.objects.values() {
            *counts.entry(c.as_str()).or_insert(0) += 1;
        }
        counts
    }

    /// The `|om|` measure of bounded differencing: the largest number of
    /// instances any single class has.
    pub fn max_instances_per_class(&self) -> usize {
        self.class_counts().values().copied().max().unwrap_or(0)
    }

    /// Objects and links without the model name; equal for models that
    /// differ only in name. Also the secondary sort key of witness lists.
    pub fn canonical_body(&self) -> String {
        let mut s = String::new();
        for (id, class) in &self.objects {
            let _ = writeln!(s, "  {id}: {class};");
        }
        for l in &self.links {
            let _ = writeln!(s, "  link {} {} -- {};", l.assoc, l.src, l.dst);
        }
        s
    }

    pub fn same_content(&self, other: &ObjectModel) -> bool {
        self.objects == other.objects && self.links == other.links
    }
}

impl fmt::Display for ObjectModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "objectmodel {} {{", self.name)?;
        f.write_str(&self.canonical_body())?;
        f.write_str("}\n")
    }
}

/// Parses an object model, rejecting duplicate object ids and links to
/// undeclared objects. Repeated identical links collapse into one.
pub fn parse_om(text: &str) -> Result<ObjectModel, ParseError> {
    let mut cur = Cursor::new(lex(text, CD_SYMBOLS)?);
    cur.expect_keyword("objectmodel")?;
    let (name, _) = cur.ident("model name")?;
    cur.expect_sym("{")?;
    let mut om = ObjectModel::new(name);
    let mut declared: HashMap<String, Pos> = HashMap::new();
    let mut endpoints: Vec<(String, Pos)> = Vec::new();
    let mut diags = Vec::new();
    while !cur.at_sym("}") {
        let is_link = cur.at_keyword("link") && !matches!(cur.peek_nth(1), Tok::Sym(":"));
        if is_link {
            cur.bump();
            let (assoc, _) = cur.ident("association name")?;
            let (src, spos) = cur.ident("source object")?;
            cur.expect_sym("--")?;
            let (dst, dpos) = cur.ident("target object")?;
            cur.expect_sym(";")?;
            endpoints.push((src.clone(), spos));
            endpoints.push((dst.clone(), dpos));
            om.links.insert(Link { assoc, src, dst });
        } else {
            let (id, pos) = cur.ident("object id, `link` or `}`")?;
            cur.expect_sym(":")?;
            let (class, _) = cur.ident("class name")?;
            cur.expect_sym(";")?;
            if let Some(prev) = declared.get(&id) {
                diags.push(Diagnostic::new(
                    pos,
                    DiagnosticKind::DuplicateName,
                    format!("object `{id}` already declared at {prev}"),
                ));
                continue;
            }
            declared.insert(id.clone(), pos);
            om.objects.insert(id, class);
        }
    }
    cur.expect_sym("}")?;
    cur.expect_eof()?;
    for (id, pos) in endpoints {
        if !declared.contains_key(&id) {
            diags.push(Diagnostic::new(
                pos,
                DiagnosticKind::UnknownName,
                format!("unknown object `{id}`"),
            ));
        }
    }
    if diags.is_empty() {
        Ok(om)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model() {
        let om = parse_om("objectmodel m { }").unwrap();
        assert!(om.is_empty());
        assert!(om.links.is_empty());
    }

    #[test]
    fn objects_and_link() {
        let om =
            parse_om("objectmodel m { e1: Employee; t1: Task; link worksOn e1 -- t1; }").unwrap();
        assert_eq!(om.len(), 2);
        assert_eq!(om.links.len(), 1);
        assert_eq!(om.objects["e1"], "Employee");
    }

    #[test]
    fn link_to_unknown_object() {
        let err = parse_om("objectmodel m { link worksOn e1 -- t1; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::UnknownName));
        assert!(err.diagnostics[0].message.contains("e1"));
        assert!(err.diagnostics.iter().all(|d| d.pos.is_some()));
    }

    #[test]
    fn duplicate_object() {
        let err = parse_om("objectmodel m { a: A; a: B; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::DuplicateName));
    }

    #[test]
    fn object_named_link() {
        let om = parse_om("objectmodel m { link: Chain; link r link -- link; }").unwrap();
        assert_eq!(om.objects["link"], "Chain");
        assert_eq!(om.links.len(), 1);
    }

    #[test]
    fn repeated_link_collapses() {
        let om = parse_om("objectmodel m { a: A; link r a -- a; link r a -- a; }").unwrap();
        assert_eq!(om.links.len(), 1);
    }

    #[test]
    fn measure_is_per_class_maximum() {
        let om = ObjectModel::new("m")
            .with_object("a1", "A")
            .with_object("a2", "A")
            .with_object("b1", "B");
        assert_eq!(om.max_instances_per_class(), 2);
    }

    #[test]
    fn printed_form_reparses() {
        let om =
            parse_om("objectmodel m { t1: Task; e1: Employee; link worksOn e1 -- t1; }").unwrap();
        assert_eq!(parse_om(&om.to_string()).unwrap(), om);
    }
}
