//! Lexing and diagnostics shared by the textual model languages.

use std::fmt;

use thiserror::Error;

/// A 1-based line/column position in source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// What went wrong while reading a model file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Syntax,
    DuplicateName,
    UnknownName,
    InheritanceCycle,
    BadMultiplicity,
    Degree,
    InitialCount,
    FinalCount,
    MissingGuard,
    MisplacedGuard,
    Type,
    Unreachable,
    Reserved,
    StepNumber,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Option<Pos>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(
        pos: impl Into<Option<Pos>>,
        kind: DiagnosticKind,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            pos: pos.into(),
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(pos) => write!(f, "{pos}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// One or more diagnostics produced while parsing or validating a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    pub fn single(d: Diagnostic) -> Self {
        ParseError {
            diagnostics: vec![d],
        }
    }

    pub fn has_kind(&self, kind: DiagnosticKind) -> bool {
        self.diagnostics.iter().any(|d| d.kind == kind)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    /// Punctuation or operator, e.g. `{`, `--`, `]->`.
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits `src` into tokens. `symbols` lists the recognised punctuation,
/// longest first; `//` starts a comment running to end of line.
pub fn lex(src: &str, symbols: &[&'static str]) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut rest = src;
    while let Some(c) = rest.chars().next() {
        let pos = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            rest = &rest[1..];
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if rest.starts_with("//") {
            let end = rest.find('\n').unwrap_or(rest.len());
            col += rest[..end].chars().count();
            rest = &rest[end..];
            continue;
        }
        let len = if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            out.push(Token {
                tok: Tok::Ident(rest[..len].to_string()),
                pos,
            });
            len
        } else if c.is_ascii_digit() {
            let len = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            let n = rest[..len].parse().map_err(|_| {
                ParseError::single(Diagnostic::new(
                    pos,
                    DiagnosticKind::Syntax,
                    "number too large",
                ))
            })?;
            out.push(Token {
                tok: Tok::Nat(n),
                pos,
            });
            len
        } else if let Some(sym) = symbols.iter().find(|s| rest.starts_with(**s)) {
            out.push(Token {
                tok: Tok::Sym(sym),
                pos,
            });
            sym.len()
        } else {
            return Err(ParseError::single(Diagnostic::new(
                pos,
                DiagnosticKind::Syntax,
                format!("unexpected character `{c}`"),
            )));
        };
        col += len;
        rest = &rest[len..];
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

/// Recursive-descent cursor over a token vector.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, at: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_nth(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn error(&self, expected: &str) -> ParseError {
        ParseError::single(Diagnostic::new(
            self.pos(),
            DiagnosticKind::Syntax,
            format!("expected {expected}, found {}", self.peek()),
        ))
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat_sym(s) {
            Ok(pos)
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat_keyword(k) {
            Ok(pos)
        } else {
            Err(self.error(&format!("`{k}`")))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn nat(&mut self, what: &str) -> Result<(u64, Pos), ParseError> {
        match *self.peek() {
            Tok::Nat(n) => {
                let pos = self.bump().pos;
                Ok((n, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error("end of input")),
        }
    }
}

/// True if `s` is a well-formed identifier of the model languages.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMS: &[&str] = &["]->", "->", "-[", "--", "..", "{", "}", "[", "]", ";", "*"];

    #[test]
    fn longest_symbol_wins() {
        let toks = lex("a -[x]-> b -- c [0..*]", SYMS).unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("-["),
                Tok::Ident("x".into()),
                Tok::Sym("]->"),
                Tok::Ident("b".into()),
                Tok::Sym("--"),
                Tok::Ident("c".into()),
                Tok::Sym("["),
                Tok::Nat(0),
                Tok::Sym(".."),
                Tok::Sym("*"),
                Tok::Sym("]"),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions_skip_comments() {
        let toks = lex("// hi\n  foo // bar\nbaz", SYMS).unwrap();
        assert_eq!(toks[0].pos, Pos { line: 2, col: 3 });
        assert_eq!(toks[1].pos, Pos { line: 3, col: 1 });
    }

    #[test]
    fn stray_character_is_positioned() {
        let err = lex("ok\n  $", SYMS).unwrap_err();
        assert_eq!(err.diagnostics[0].pos, Some(Pos { line: 2, col: 3 }));
    }
}
