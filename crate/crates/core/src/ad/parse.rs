use std::collections::HashMap;

use super::ast::{
    ActivityDiagram, AssignSource, Assignment, Domain, Edge, Guard, Node, NodeKind, Site, VarDecl,
    VarKind, END, START,
};
use crate::syntax::{lex, Cursor, Diagnostic, DiagnosticKind, ParseError, Pos, Tok};

const AD_SYMBOLS: &[&str] = &[
    "]->", "->", "-[", ":=", "==", "!=", "&&", "||", "!", "(", ")", "{", "}", ",", ";", ":", "/",
    "=",
];

/// Parses and validates an activity diagram.
pub fn parse_ad(text: &str) -> Result<ActivityDiagram, ParseError> {
    let mut cur = Cursor::new(lex(text, AD_SYMBOLS)?);
    cur.expect_keyword("activity")?;
    let (name, _) = cur.ident("activity name")?;
    cur.expect_sym("{")?;

    let mut ad = ActivityDiagram {
        name,
        ..Default::default()
    };
    ad.nodes.push(Node::new(START, NodeKind::Initial));
    let mut node_pos: HashMap<String, Pos> = HashMap::new();
    let mut var_pos: HashMap<String, Pos> = HashMap::new();
    let mut edge_pos: Vec<Pos> = Vec::new();
    let mut diags = Vec::new();
    // assignment sources are resolved once every variable is known
    let mut raw_assigns: Vec<(usize, Vec<(String, String)>)> = Vec::new();
    let mut uses_end = false;

    while !cur.at_sym("}") {
        let is_edge =
            matches!(cur.peek(), Tok::Ident(_)) && matches!(cur.peek_nth(1), Tok::Sym("->" | "-["));
        if is_edge {
            let (src, pos) = cur.ident("edge source")?;
            let guard = if cur.eat_sym("-[") {
                let g = guard_or(&mut cur)?;
                cur.expect_sym("]->")?;
                Some(g)
            } else {
                cur.expect_sym("->")?;
                None
            };
            let (dst, dpos) = cur.ident("edge target")?;
            cur.expect_sym(";")?;
            for n in [&src, &dst] {
                if n == START || n == END {
                    node_pos
                        .entry(n.clone())
                        .or_insert(if n == &src { pos } else { dpos });
                }
            }
            uses_end |= src == END || dst == END;
            edge_pos.push(pos);
            ad.edges.push(Edge {
                source: src,
                target: dst,
                guard,
            });
            continue;
        }
        let (kw, kw_pos) = cur.ident("declaration, edge or `}`")?;
        match kw.as_str() {
            "input" | "local" => {
                let (vname, vpos) = cur.ident("variable name")?;
                cur.expect_sym(":")?;
                let domain = if cur.eat_keyword("bool") {
                    Domain::Bool
                } else {
                    cur.expect_sym("{")?;
                    let mut vals = vec![cur.ident("value")?.0];
                    while cur.eat_sym(",") {
                        vals.push(cur.ident("value")?.0);
                    }
                    cur.expect_sym("}")?;
                    if vals.len() < 2 {
                        return Err(ParseError::single(Diagnostic::new(
                            vpos,
                            DiagnosticKind::Syntax,
                            "an enumeration needs at least two values",
                        )));
                    }
                    Domain::Enum(vals)
                };
                let initial = if cur.eat_sym("=") {
                    Some(cur.ident("initial value")?.0)
                } else {
                    None
                };
                cur.expect_sym(";")?;
                var_pos.entry(vname.clone()).or_insert(vpos);
                let kind = if kw == "input" {
                    VarKind::Input
                } else {
                    VarKind::Local
                };
                ad.variables.push(VarDecl {
                    name: vname,
                    kind,
                    domain,
                    initial,
                });
            }
            "action" | "decision" | "merge" | "fork" | "join" | "final" => {
                let (nname, npos) = cur.ident("node name")?;
                let kind = match kw.as_str() {
                    "action" => NodeKind::Action,
                    "decision" => NodeKind::Decision,
                    "merge" => NodeKind::Merge,
                    "fork" => NodeKind::Fork,
                    "join" => NodeKind::Join,
                    _ => NodeKind::Final,
                };
                let mut assigns = Vec::new();
                if kind == NodeKind::Action && cur.eat_sym("/") {
                    loop {
                        let (target, _) = cur.ident("variable")?;
                        cur.expect_sym(":=")?;
                        let (source, _) = cur.ident("value or variable")?;
                        assigns.push((target, source));
                        if !cur.eat_sym(",") {
                            break;
                        }
                    }
                }
                cur.expect_sym(";")?;
                if nname == START || nname == END {
                    diags.push(Diagnostic::new(
                        npos,
                        DiagnosticKind::Reserved,
                        format!("`{nname}` is reserved for the initial/final node"),
                    ));
                    continue;
                }
                node_pos.entry(nname.clone()).or_insert(npos);
                if !assigns.is_empty() {
                    raw_assigns.push((ad.nodes.len(), assigns));
                }
                ad.nodes.push(Node::new(nname, kind));
            }
            _ => {
                return Err(ParseError::single(Diagnostic::new(
                    kw_pos,
                    DiagnosticKind::Syntax,
                    format!("expected declaration or edge, found `{kw}`"),
                )))
            }
        }
    }
    let close = cur.expect_sym("}")?;
    cur.expect_eof()?;
    if uses_end {
        ad.nodes.push(Node::new(END, NodeKind::Final));
    }
    for (ni, assigns) in raw_assigns {
        ad.nodes[ni].assignments = assigns
            .into_iter()
            .map(|(target, src)| {
                let source = if ad.variable(&src).is_some() {
                    AssignSource::Var(src)
                } else {
                    AssignSource::Value(src)
                };
                Assignment { target, source }
            })
            .collect();
    }

    diags.extend(ad.check(|site| match site {
        Site::Node(n) => node_pos.get(n).copied().or(Some(close)),
        Site::Edge(i) => edge_pos.get(i).copied(),
        Site::Var(v) => var_pos.get(v).copied(),
        Site::Diagram => Some(close),
    }));
    if diags.is_empty() {
        Ok(ad)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}

fn guard_or(cur: &mut Cursor) -> Result<Guard, ParseError> {
    let mut g = guard_and(cur)?;
    while cur.eat_sym("||") {
        g = Guard::Or(Box::new(g), Box::new(guard_and(cur)?));
    }
    Ok(g)
}

fn guard_and(cur: &mut Cursor) -> Result<Guard, ParseError> {
    let mut g = guard_not(cur)?;
    while cur.eat_sym("&&") {
        g = Guard::And(Box::new(g), Box::new(guard_not(cur)?));
    }
    Ok(g)
}

fn guard_not(cur: &mut Cursor) -> Result<Guard, ParseError> {
    if cur.eat_sym("!") {
        return Ok(Guard::Not(Box::new(guard_not(cur)?)));
    }
    if cur.eat_sym("(") {
        let g = guard_or(cur)?;
        cur.expect_sym(")")?;
        return Ok(g);
    }
    let (v, _) = cur.ident("guard expression")?;
    if cur.eat_sym("==") {
        return Ok(Guard::Eq(v, cur.ident("value")?.0));
    }
    if cur.eat_sym("!=") {
        return Ok(Guard::Ne(v, cur.ident("value")?.0));
    }
    Ok(match v.as_str() {
        "true" => Guard::True,
        "false" => Guard::False,
        _ => Guard::Var(v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_linear_diagram() {
        let ad = parse_ad("activity A { start -> a; action a; a -> end; }").unwrap();
        assert_eq!(ad.nodes.len(), 3);
        assert_eq!(ad.edges.len(), 2);
        assert_eq!(ad.nodes[0].kind, NodeKind::Initial);
        assert_eq!(ad.nodes[2].kind, NodeKind::Final);
    }

    #[test]
    fn unguarded_decision_edge() {
        let err = parse_ad(
            "activity A { input b: bool; decision d; action x; action y;
             start -> d; d -[b]-> x; d -> y; x -> end; y -> end; }",
        )
        .unwrap_err();
        assert!(err.has_kind(DiagnosticKind::MissingGuard));
        assert_eq!(err.diagnostics.len(), 1);
        assert_eq!(err.diagnostics[0].pos.unwrap().line, 2);
    }

    #[test]
    fn guard_outside_decision() {
        let err = parse_ad("activity A { input b: bool; action a; start -[b]-> a; a -> end; }")
            .unwrap_err();
        assert!(err.has_kind(DiagnosticKind::MisplacedGuard));
    }

    #[test]
    fn guard_typing() {
        let text = "activity A { input s: {x, y}; decision d; action p; action q;
             start -> d; d -[s == z]-> p; d -[s || u == x]-> q; p -> end; q -> end; }";
        let err = parse_ad(text).unwrap_err();
        let kinds: Vec<_> = err.diagnostics.iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds.iter().filter(|k| **k == DiagnosticKind::Type).count(),
            2
        );
        assert!(kinds.contains(&DiagnosticKind::UnknownName));
    }

    #[test]
    fn degree_violations() {
        let err =
            parse_ad("activity A { fork f; action a; start -> f; f -> a; a -> end; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::Degree));
        let err = parse_ad("activity A { action a; start -> a; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::Degree));
        assert!(err.has_kind(DiagnosticKind::FinalCount));
    }

    #[test]
    fn unreachable_node() {
        let err = parse_ad("activity A { action a; action b; start -> a; a -> end; b -> end; }")
            .unwrap_err();
        assert!(err.has_kind(DiagnosticKind::Unreachable));
        assert!(err.diagnostics[0].message.contains("`b`"));
    }

    #[test]
    fn reserved_and_start_as_target() {
        let err = parse_ad("activity A { action start; start -> end; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::Reserved));
        let err = parse_ad("activity A { action a; start -> a; a -> start; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::Degree));
    }

    #[test]
    fn assignments_resolve_variables() {
        let ad = parse_ad(
            "activity A { input b: bool; local c: bool = false; local e: {p, q} = p;
             action a / c := b, e := q; start -> a; a -> end; }",
        )
        .unwrap();
        let a = ad.node("a").unwrap();
        assert_eq!(a.assignments[0].source, AssignSource::Var("b".into()));
        assert_eq!(a.assignments[1].source, AssignSource::Value("q".into()));
    }

    #[test]
    fn bad_assignment_and_locals() {
        let err = parse_ad(
            "activity A { local c: bool; local e: {p, q} = p; action a / e := r; start -> a; a -> end; }",
        )
        .unwrap_err();
        assert_eq!(
            err.diagnostics
                .iter()
                .filter(|d| d.kind == DiagnosticKind::Type)
                .count(),
            2
        );
    }

    #[test]
    fn additional_final_nodes() {
        let ad = parse_ad(
            "activity A { input b: bool; decision d; final stop; action a;
             start -> d; d -[b]-> a; d -[!b]-> stop; a -> end; }",
        )
        .unwrap();
        assert_eq!(
            ad.nodes
                .iter()
                .filter(|n| n.kind == NodeKind::Final)
                .count(),
            2
        );
        assert_eq!(parse_ad(&ad.to_string()).unwrap(), ad);
    }

    #[test]
    fn guard_precedence_round_trips() {
        let text = "activity A { input b: bool; input c: bool; decision d; action x; action y;
             start -> d; d -[!(b || c) && b != true]-> x; d -[b || c && !c]-> y; x -> end; y -> end; }";
        let ad = parse_ad(text).unwrap();
        assert!(matches!(ad.edges[1].guard, Some(Guard::And(..))));
        assert!(matches!(ad.edges[2].guard, Some(Guard::Or(..))));
        assert_eq!(parse_ad(&ad.to_string()).unwrap(), ad);
    }

    #[test]
    fn syntax_error_positions() {
        let err = parse_ad("activity A {\n  start => a;\n}").unwrap_err();
        assert_eq!(err.diagnostics[0].kind, DiagnosticKind::Syntax);
        assert_eq!(err.diagnostics[0].pos, Some(Pos { line: 2, col: 10 }));
    }
}
