//! Deterministic renderings of object models, traces and diff results as
//! plain text, Graphviz DOT or JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::ad::{ActivityDiagram, AdDiffResult, NodeKind, Trace};
use crate::cd::{CdDiffResult, ObjectModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Text,
    Dot,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Dot => "dot",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown format `{other}` (expected text, dot or json)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedArtifact {
    pub format: Format,
    pub payload: String,
}

impl fmt::Display for RenderedArtifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.payload)
    }
}

/// Which way a diff was taken, relative to the order the models were given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    AtoB,
    BtoA,
}

#[derive(Serialize)]
struct ObjectJson<'a> {
    id: &'a str,
    class: &'a str,
}

#[derive(Serialize)]
struct LinkJson<'a> {
    assoc: &'a str,
    src: &'a str,
    dst: &'a str,
}

#[derive(Serialize)]
struct ObjectModelJson<'a> {
    objects: Vec<ObjectJson<'a>>,
    links: Vec<LinkJson<'a>>,
}

impl<'a> From<&'a ObjectModel> for ObjectModelJson<'a> {
    fn from(om: &'a ObjectModel) -> Self {
        ObjectModelJson {
            objects: om
                .objects
                .iter()
                .map(|(id, class)| ObjectJson { id, class })
                .collect(),
            links: om
                .links
                .iter()
                .map(|l| LinkJson {
                    assoc: &l.assoc,
                    src: &l.src,
                    dst: &l.dst,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct DiffJson<W> {
    direction: Direction,
    exhausted: bool,
    bound: Option<usize>,
    witnesses: Vec<W>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// A DOT identifier, always quoted.
fn id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn om_body(out: &mut String, om: &ObjectModel, prefix: &str, indent: &str) {
    for (oid, class) in &om.objects {
        let _ = writeln!(
            out,
            "{indent}{} [label={}];",
            id(&format!("{prefix}{oid}")),
            id(&format!("{oid}:{class}"))
        );
    }
    for l in &om.links {
        let _ = writeln!(
            out,
            "{indent}{} -> {} [label={}];",
            id(&format!("{prefix}{}", l.src)),
            id(&format!("{prefix}{}", l.dst)),
            id(&l.assoc)
        );
    }
}

pub fn render_om(om: &ObjectModel, format: Format) -> RenderedArtifact {
    let payload = match format {
        Format::Text => om.to_string(),
        Format::Json => json(&ObjectModelJson::from(om)),
        Format::Dot => {
            let mut s = format!("digraph {} {{\n  node [shape=box];\n", id(&om.name));
            om_body(&mut s, om, "", "  ");
            s.push_str("}\n");
            s
        }
    };
    RenderedArtifact { format, payload }
}

/// Step numbers per action name.
type Steps = BTreeMap<String, Vec<usize>>;

/// Step numbers per action, and the steps naming actions `ad` lacks.
fn numbering(ad: &ActivityDiagram, t: &Trace) -> (Steps, Vec<(usize, String)>) {
    let actions = ad.action_names();
    let mut steps = Steps::new();
    let mut foreign = Vec::new();
    for (i, a) in t.actions.iter().enumerate() {
        if actions.contains(a.as_str()) {
            steps.entry(a.clone()).or_default().push(i + 1);
        } else {
            foreign.push((i + 1, a.clone()));
        }
    }
    (steps, foreign)
}

fn trace_body(out: &mut String, ad: &ActivityDiagram, t: &Trace, prefix: &str, indent: &str) {
    let (steps, foreign) = numbering(ad, t);
    if !t.inputs.is_empty() || !foreign.is_empty() {
        let mut label: Vec<String> = t.inputs.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        if !foreign.is_empty() {
            let list: Vec<String> = foreign.iter().map(|(i, a)| format!("{i}: {a}")).collect();
            label.push(format!("foreign actions: {}", list.join(", ")));
        }
        let _ = writeln!(out, "{indent}label={};", id(&label.join("\n")));
    }
    for n in &ad.nodes {
        let name = id(&format!("{prefix}{}", n.name));
        let attrs = match n.kind {
            NodeKind::Initial => {
                "shape=circle, style=filled, fillcolor=black, label=\"\", width=0.2".to_string()
            }
            NodeKind::Final => "shape=doublecircle, label=\"\", width=0.2".to_string(),
            NodeKind::Decision | NodeKind::Merge => format!("shape=diamond, label={}", id(&n.name)),
            NodeKind::Fork | NodeKind::Join => {
                format!(
                    "shape=box, style=filled, fillcolor=black, height=0.1, label=\"\", xlabel={}",
                    id(&n.name)
                )
            }
            NodeKind::Action => match steps.get(&n.name) {
                Some(s) => {
                    let nums: Vec<String> = s.iter().map(usize::to_string).collect();
                    format!(
                        "shape=box, style=\"rounded,filled,bold\", fillcolor=lightblue, label={}",
                        id(&format!("{}\n[{}]", n.name, nums.join(",")))
                    )
                }
                None => format!("shape=box, style=rounded, label={}", id(&n.name)),
            },
        };
        let _ = writeln!(out, "{indent}{name} [{attrs}];");
    }
    for e in &ad.edges {
        let guard = e
            .guard
            .as_ref()
            .map(|g| format!(" [label={}]", id(&format!("[{g}]"))))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{indent}{} -> {}{guard};",
            id(&format!("{prefix}{}", e.source)),
            id(&format!("{prefix}{}", e.target))
        );
    }
}

/// Renders a trace; in DOT form the diagram is drawn with the actions the
/// trace visits highlighted and numbered by step.
pub fn render_trace(ad: &ActivityDiagram, t: &Trace, format: Format) -> RenderedArtifact {
    let payload = match format {
        Format::Text => {
            let mut s = t.to_string();
            s.push('\n');
            let (_, foreign) = numbering(ad, t);
            if !foreign.is_empty() {
                let list: Vec<String> = foreign.iter().map(|(i, a)| format!("{i}: {a}")).collect();
                let _ = writeln!(
                    s,
                    "// foreign actions (not in {}): {}",
                    ad.name,
                    list.join(", ")
                );
            }
            s
        }
        Format::Json => json(t),
        Format::Dot => {
            let mut s = format!("digraph {} {{\n", id(&ad.name));
            trace_body(&mut s, ad, t, "", "  ");
            s.push_str("}\n");
            s
        }
    };
    RenderedArtifact { format, payload }
}

fn summary(count: usize, exhausted: bool, cap: usize, bound: &str) -> String {
    match (count, exhausted) {
        (0, true) => format!("no witnesses (exhausted{bound})"),
        (0, false) => format!("no witnesses (search incomplete{bound})"),
        (n, true) => format!(
            "{n} witness{} (exhausted{bound})",
            if n == 1 { "" } else { "es" }
        ),
        (n, false) => format!(
            "{n} witness{} (stopped at {cap}{bound})",
            if n == 1 { "" } else { "es" }
        ),
    }
}

pub fn render_cd_diff(
    result: &CdDiffResult,
    direction: Direction,
    format: Format,
) -> RenderedArtifact {
    let payload = match format {
        Format::Text => {
            let mut s = String::new();
            for w in &result.witnesses {
                s.push_str(&w.to_string());
                s.push('\n');
            }
            let bound = format!(", k={}", result.bound);
            s.push_str(&summary(
                result.witnesses.len(),
                result.exhausted,
                result.requested,
                &bound,
            ));
            s.push('\n');
            s
        }
        Format::Json => json(&DiffJson {
            direction,
            exhausted: result.exhausted,
            bound: Some(result.bound),
            witnesses: result.witnesses.iter().map(ObjectModelJson::from).collect(),
        }),
        Format::Dot => {
            let mut s = "digraph cddiff {\n  node [shape=box];\n".to_string();
            for w in &result.witnesses {
                let _ = writeln!(
                    s,
                    "  subgraph {} {{\n    label={};",
                    id(&format!("cluster_{}", w.name)),
                    id(&w.name)
                );
                om_body(&mut s, w, &format!("{}.", w.name), "    ");
                s.push_str("  }\n");
            }
            s.push_str("}\n");
            s
        }
    };
    RenderedArtifact { format, payload }
}

/// `ad` is the diagram the witnesses come from, used for DOT drawings.
pub fn render_ad_diff(
    ad: &ActivityDiagram,
    result: &AdDiffResult,
    direction: Direction,
    format: Format,
) -> RenderedArtifact {
    let payload = match format {
        Format::Text => {
            let mut s = String::new();
            for t in &result.witnesses {
                s.push_str(&t.to_string());
                s.push('\n');
            }
            let bound = result
                .max_len
                .map(|l| format!(", max length {l}"))
                .unwrap_or_default();
            s.push_str(&summary(
                result.witnesses.len(),
                result.exhausted,
                result.max_witnesses,
                &bound,
            ));
            s.push('\n');
            s
        }
        Format::Json => json(&DiffJson {
            direction,
            exhausted: result.exhausted,
            bound: result.max_len,
            witnesses: result.witnesses.iter().collect(),
        }),
        Format::Dot => {
            let mut s = "digraph addiff {\n".to_string();
            for (i, t) in result.witnesses.iter().enumerate() {
                let name = format!("w{}", i + 1);
                let _ = writeln!(s, "  subgraph {} {{", id(&format!("cluster_{name}")));
                trace_body(&mut s, ad, t, &format!("{name}."), "    ");
                s.push_str("  }\n");
            }
            s.push_str("}\n");
            s
        }
    };
    RenderedArtifact { format, payload }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DotTok {
    Id(String),
    Sym(char),
    Arrow,
}

fn dot_tokens(src: &str) -> Result<Vec<DotTok>, String> {
    let mut out = Vec::new();
    let mut it = src.chars().peekable();
    while let Some(c) = it.next() {
        match c {
            c if c.is_whitespace() => {}
            '"' => {
                let mut s = String::new();
                loop {
                    match it.next() {
                        Some('\\') => s.push(it.next().ok_or("unterminated string")?),
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                out.push(DotTok::Id(s));
            }
            '-' if it.peek() == Some(&'>') || it.peek() == Some(&'-') => {
                it.next();
                out.push(DotTok::Arrow);
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => out.push(DotTok::Sym(c)),
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let mut s = c.to_string();
                while let Some(&d) = it.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '.' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(DotTok::Id(s));
            }
            c => return Err(format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

/// Minimal well-formedness check for the DOT this module emits: a single
/// `digraph`/`graph` with balanced braces, every statement terminated, and
/// every edge endpoint declared as a node somewhere in the graph.
pub fn validate_dot(src: &str) -> Result<(), String> {
    let toks = dot_tokens(src)?;
    let mut i = 0;
    let next_id = |i: &mut usize| -> Option<String> {
        match toks.get(*i) {
            Some(DotTok::Id(s)) => {
                *i += 1;
                Some(s.clone())
            }
            _ => None,
        }
    };
    match next_id(&mut i).as_deref() {
        Some("digraph") | Some("graph") => {}
        _ => return Err("expected `digraph`".into()),
    }
    next_id(&mut i);
    if toks.get(i) != Some(&DotTok::Sym('{')) {
        return Err("expected `{`".into());
    }
    i += 1;
    let mut depth = 1;
    let mut declared = BTreeSet::new();
    let mut used = BTreeSet::new();
    let skip_attrs = |i: &mut usize| -> Result<(), String> {
        if toks.get(*i) == Some(&DotTok::Sym('[')) {
            while toks.get(*i) != Some(&DotTok::Sym(']')) {
                if *i >= toks.len() {
                    return Err("unterminated attribute list".into());
                }
                *i += 1;
            }
            *i += 1;
        }
        Ok(())
    };
    while depth > 0 {
        match toks.get(i) {
            None => return Err("unbalanced braces".into()),
            Some(DotTok::Sym('}')) => {
                depth -= 1;
                i += 1;
            }
            Some(DotTok::Id(kw)) if kw == "subgraph" => {
                i += 1;
                next_id(&mut i);
                if toks.get(i) != Some(&DotTok::Sym('{')) {
                    return Err("expected `{` after subgraph".into());
                }
                depth += 1;
                i += 1;
            }
            Some(DotTok::Id(kw)) if matches!(kw.as_str(), "node" | "edge" | "graph") => {
                i += 1;
                skip_attrs(&mut i)?;
                if toks.get(i) != Some(&DotTok::Sym(';')) {
                    return Err(format!("expected `;` after `{kw}` attributes"));
                }
                i += 1;
            }
            Some(DotTok::Id(first)) => {
                let first = first.clone();
                i += 1;
                if toks.get(i) == Some(&DotTok::Sym('=')) {
                    i += 1;
                    next_id(&mut i).ok_or("expected attribute value")?;
                } else if toks.get(i) == Some(&DotTok::Arrow) {
                    used.insert(first);
                    while toks.get(i) == Some(&DotTok::Arrow) {
                        i += 1;
                        used.insert(next_id(&mut i).ok_or("expected edge target")?);
                    }
                    skip_attrs(&mut i)?;
                } else {
                    declared.insert(first);
                    skip_attrs(&mut i)?;
                }
                if toks.get(i) != Some(&DotTok::Sym(';')) {
                    return Err("expected `;`".into());
                }
                i += 1;
            }
            Some(t) => return Err(format!("unexpected {t:?}")),
        }
    }
    if i != toks.len() {
        return Err("content after the closing brace".into());
    }
    match used.difference(&declared).next() {
        Some(n) => Err(format!("edge endpoint `{n}` is not declared")),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::{parse_ad, Valuation};
    use crate::cd::parse_om;

    fn sample_om() -> ObjectModel {
        ObjectModel::new("m")
            .with_object("e1", "Employee")
            .with_object("t1", "Task")
            .with_link("worksOn", "e1", "t1")
    }

    #[test]
    fn empty_model_dot() {
        let r = render_om(&ObjectModel::new("empty"), Format::Dot);
        assert_eq!(r.payload, "digraph \"empty\" {\n  node [shape=box];\n}\n");
        validate_dot(&r.payload).unwrap();
    }

    #[test]
    fn om_formats() {
        let om = sample_om();
        assert_eq!(parse_om(&render_om(&om, Format::Text).payload).unwrap(), om);
        let dot = render_om(&om, Format::Dot).payload;
        assert!(dot.contains("\"e1\" [label=\"e1:Employee\"];"));
        assert!(dot.contains("\"e1\" -> \"t1\" [label=\"worksOn\"];"));
        validate_dot(&dot).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&render_om(&om, Format::Json).payload).unwrap();
        assert_eq!(v["objects"][0]["class"], "Employee");
        assert_eq!(v["links"][0]["dst"], "t1");
    }

    #[test]
    fn linear_trace_is_numbered() {
        let ad = parse_ad(
            "activity L { action a; action b; action c; start -> a; a -> b; b -> c; c -> end; }",
        )
        .unwrap();
        let t = Trace::new(Valuation::new(), ["a", "b", "c"]);
        let dot = render_trace(&ad, &t, Format::Dot).payload;
        validate_dot(&dot).unwrap();
        for (i, a) in ["a", "b", "c"].iter().enumerate() {
            assert!(
                dot.contains(&format!("label=\"{a}\\n[{}]\"", i + 1)),
                "{dot}"
            );
        }
    }

    #[test]
    fn repeated_and_foreign_actions() {
        let ad = parse_ad("activity L { merge m; action a; decision d; start -> m; m -> a; a -> d; d -[true]-> m; d -[true]-> end; }")
            .unwrap();
        let t = Trace::new(Valuation::new(), ["a", "zz", "a"]);
        let dot = render_trace(&ad, &t, Format::Dot).payload;
        validate_dot(&dot).unwrap();
        assert!(dot.contains("a\\n[1,3]"));
        assert!(dot.contains("foreign actions: 2: zz"));
        assert!(!dot.contains("\"zz\" ["));
        assert!(render_trace(&ad, &t, Format::Text)
            .payload
            .contains("foreign actions (not in L): 2: zz"));
    }

    #[test]
    fn validator_rejects_broken_graphs() {
        assert!(validate_dot("digraph g { a; }").is_ok());
        assert!(validate_dot("digraph g { a; ").is_err());
        assert!(validate_dot("digraph g { a -> b; a; }").is_err());
        assert!(validate_dot("digraph g { a; } }").is_err());
        assert!(validate_dot("digraph g { subgraph s { a; b; a -> b [label=\"x\"]; } }").is_ok());
        assert!(validate_dot("graph g { \"a").is_err());
    }

    #[test]
    fn quoting() {
        assert_eq!(id("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
