use std::collections::{BTreeMap, HashMap};

use super::ast::{Association, ClassDecl, ClassDiagram, Modifier, Multiplicity, Site};
use crate::syntax::{lex, Cursor, Diagnostic, DiagnosticKind, ParseError, Pos};

pub(crate) const CD_SYMBOLS: &[&str] = &["--", "..", "{", "}", "[", "]", ";", "*", ":"];

#[derive(Default)]
struct Spans {
    parent: HashMap<String, Pos>,
    left: HashMap<String, Pos>,
    right: HashMap<String, Pos>,
    left_mult: HashMap<String, Pos>,
    right_mult: HashMap<String, Pos>,
}

/// Parses and validates a class diagram.
pub fn parse_cd(text: &str) -> Result<ClassDiagram, ParseError> {
    let mut cur = Cursor::new(lex(text, CD_SYMBOLS)?);
    let mut spans = Spans::default();
    let mut diags = Vec::new();

    cur.expect_keyword("classdiagram")?;
    let (name, _) = cur.ident("diagram name")?;
    cur.expect_sym("{")?;
    let mut classes: BTreeMap<String, ClassDecl> = BTreeMap::new();
    let mut associations: BTreeMap<String, Association> = BTreeMap::new();
    let mut class_pos: HashMap<String, Pos> = HashMap::new();
    let mut assoc_pos: HashMap<String, Pos> = HashMap::new();

    while !cur.at_sym("}") {
        if cur.at_keyword("association") {
            cur.bump();
            let (aname, apos) = cur.ident("association name")?;
            let (left_mult, lmpos) = opt_mult(&mut cur)?;
            let (left, lpos) = cur.ident("class name")?;
            cur.expect_sym("--")?;
            let (right, rpos) = cur.ident("class name")?;
            let (right_mult, rmpos) = opt_mult(&mut cur)?;
            cur.expect_sym(";")?;
            if let Some(prev) = assoc_pos.get(&aname) {
                diags.push(Diagnostic::new(
                    apos,
                    DiagnosticKind::DuplicateName,
                    format!("association `{aname}` already declared at {prev}"),
                ));
                continue;
            }
            assoc_pos.insert(aname.clone(), apos);
            spans.left.insert(aname.clone(), lpos);
            spans.right.insert(aname.clone(), rpos);
            spans.left_mult.insert(aname.clone(), lmpos);
            spans.right_mult.insert(aname.clone(), rmpos);
            associations.insert(
                aname.clone(),
                Association {
                    name: aname,
                    left,
                    left_mult,
                    right,
                    right_mult,
                },
            );
        } else {
            let modifier = if cur.eat_keyword("abstract") {
                Modifier::Abstract
            } else if cur.eat_keyword("singleton") {
                Modifier::Singleton
            } else {
                Modifier::Concrete
            };
            if !cur.at_keyword("class") {
                return Err(cur.error("`class`, `abstract`, `singleton`, `association` or `}`"));
            }
            cur.bump();
            let (cname, cpos) = cur.ident("class name")?;
            let parent = if cur.eat_keyword("extends") {
                let (p, ppos) = cur.ident("parent class name")?;
                spans.parent.insert(cname.clone(), ppos);
                Some(p)
            } else {
                None
            };
            cur.expect_sym(";")?;
            if let Some(prev) = class_pos.get(&cname) {
                diags.push(Diagnostic::new(
                    cpos,
                    DiagnosticKind::DuplicateName,
                    format!("class `{cname}` already declared at {prev}"),
                ));
                continue;
            }
            class_pos.insert(cname.clone(), cpos);
            classes.insert(
                cname.clone(),
                ClassDecl {
                    name: cname,
                    modifier,
                    parent,
                },
            );
        }
    }
    cur.expect_sym("}")?;
    cur.expect_eof()?;

    let cd = ClassDiagram {
        name,
        classes,
        associations,
    };
    diags.extend(cd.check(|site| match site {
        Site::Parent(c) => spans.parent.get(c).copied(),
        Site::AssocLeft(a) => spans.left.get(a).copied(),
        Site::AssocRight(a) => spans.right.get(a).copied(),
        Site::LeftMult(a) => spans.left_mult.get(a).copied(),
        Site::RightMult(a) => spans.right_mult.get(a).copied(),
    }));
    if diags.is_empty() {
        Ok(cd)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}

/// `[mult]`, or nothing (meaning `*`).
fn opt_mult(cur: &mut Cursor) -> Result<(Multiplicity, Pos), ParseError> {
    let pos = cur.pos();
    if !cur.eat_sym("[") {
        return Ok((Multiplicity::MANY, pos));
    }
    let m = if cur.eat_sym("*") {
        Multiplicity::MANY
    } else {
        let (min, _) = cur.nat("multiplicity")?;
        let min = to_u32(min, pos)?;
        if cur.eat_sym("..") {
            if cur.eat_sym("*") {
                Multiplicity::range(min, None)
            } else {
                let (max, _) = cur.nat("upper bound or `*`")?;
                Multiplicity::range(min, Some(to_u32(max, pos)?))
            }
        } else {
            Multiplicity::exactly(min)
        }
    };
    cur.expect_sym("]")?;
    Ok((m, pos))
}

fn to_u32(n: u64, pos: Pos) -> Result<u32, ParseError> {
    u32::try_from(n).map_err(|_| {
        ParseError::single(Diagnostic::new(
            pos,
            DiagnosticKind::BadMultiplicity,
            "multiplicity bound too large",
        ))
    })
}
