use std::fmt;

use serde::{Deserialize, Serialize};

use super::semantics::Valuation;
use crate::syntax::{lex, Cursor, Diagnostic, DiagnosticKind, ParseError};

/// An input valuation together with the actions of one complete run.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Trace {
    pub inputs: Valuation,
    pub actions: Vec<String>,
}

impl Trace {
    pub fn new<S: Into<String>>(inputs: Valuation, actions: impl IntoIterator<Item = S>) -> Self {
        Trace {
            inputs,
            actions: actions.into_iter().map(Into::into).collect(),
        }
    }

    /// `isInternal=true: register welcomePackage ...`
    pub fn summary(&self) -> String {
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}: {}", inputs.join(", "), self.actions.join(" "))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trace {{")?;
        if !self.inputs.is_empty() {
            let inputs: Vec<String> = self
                .inputs
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            writeln!(f, "  inputs: {};", inputs.join(", "))?;
        }
        for (i, a) in self.actions.iter().enumerate() {
            writeln!(f, "  {}: {a};", i + 1)?;
        }
        write!(f, "}}")
    }
}

const TRACE_SYMBOLS: &[&str] = &["{", "}", ";", ":", ",", "="];

/// Reads a trace in the text form printed by `Display`, or as JSON
/// `{"inputs": {...}, "actions": [...]}`.
pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| {
            ParseError::single(Diagnostic::new(
                None,
                DiagnosticKind::Syntax,
                format!("invalid JSON trace: {e}"),
            ))
        });
    }
    let mut cur = Cursor::new(lex(text, TRACE_SYMBOLS)?);
    cur.expect_keyword("trace")?;
    cur.expect_sym("{")?;
    let mut trace = Trace::default();
    if cur.eat_keyword("inputs") {
        cur.expect_sym(":")?;
        if !cur.at_sym(";") {
            loop {
                let (var, pos) = cur.ident("input name")?;
                cur.expect_sym("=")?;
                let (value, _) = cur.ident("value")?;
                if trace.inputs.insert(var.clone(), value).is_some() {
                    return Err(ParseError::single(Diagnostic::new(
                        pos,
                        DiagnosticKind::DuplicateName,
                        format!("input `{var}` given twice"),
                    )));
                }
                if !cur.eat_sym(",") {
                    break;
                }
            }
        }
        cur.expect_sym(";")?;
    }
    while !cur.at_sym("}") {
        let (n, pos) = cur.nat("step number")?;
        let expected = trace.actions.len() as u64 + 1;
        if n != expected {
            return Err(ParseError::single(Diagnostic::new(
                pos,
                DiagnosticKind::StepNumber,
                format!("expected step {expected}, found {n}"),
            )));
        }
        cur.expect_sym(":")?;
        let (action, _) = cur.ident("action name")?;
        cur.expect_sym(";")?;
        trace.actions.push(action);
    }
    cur.expect_sym("}")?;
    cur.expect_eof()?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut inputs = Valuation::new();
        inputs.insert("isInternal".into(), "false".into());
        let t = Trace::new(inputs, ["register", "assignExternal"]);
        assert_eq!(parse_trace(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn json_round_trip() {
        let t = Trace::new(Valuation::new(), ["a", "b"]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"inputs":{},"actions":["a","b"]}"#);
        assert_eq!(parse_trace(&json).unwrap(), t);
    }

    #[test]
    fn empty_trace() {
        let t = parse_trace("trace { }").unwrap();
        assert!(t.actions.is_empty() && t.inputs.is_empty());
    }

    #[test]
    fn steps_must_count_up() {
        let err = parse_trace("trace {\n  1: a;\n  3: b;\n}").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::StepNumber));
        assert_eq!(err.diagnostics[0].pos.unwrap().line, 3);
    }

    #[test]
    fn duplicate_input() {
        let err = parse_trace("trace { inputs: b = true, b = false; }").unwrap_err();
        assert!(err.has_kind(DiagnosticKind::DuplicateName));
    }
}
