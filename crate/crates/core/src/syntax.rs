//! Parsers for the surface syntax of both languages.
//!
//! ARA grammar, with `+` binding weaker than `join`, both left-associative:
//!
//! ```text
//! expr  := term ("+" term)*
//! term  := atom ("join" atom)*
//! atom  := NAME | "(" expr ")" | "one" "(" expr ")"
//!        | "proj" "{" attrs "}" "(" expr ")" | "sel" "{" attrs "}" "(" expr ")"
//!        | "ren" "{" [ATTR "->" ATTR ("," ATTR "->" ATTR)*] "}" "(" expr ")"
//!        | "comp" "{" ATTR "," INT "}" "(" expr ("," expr)* ")"
//! attrs := [ATTR ("," ATTR)*]
//! ```
//!
//! `ren` lists only the attributes that move; the rest are fixed.
//!
//! MATLANG grammar, with `*` and `.*` sharing a level above `+`:
//!
//! ```text
//! expr := term ("+" term)*
//! term := atom (("*" | ".*") atom)*
//! atom := NAME | "(" expr ")" | "t" "(" expr ")" | "ones" "(" expr ")" | "diag" "(" expr ")"
//! ```
//!
//! Printing an expression with `Display` and parsing it back yields the same
//! tree.

use std::fmt;

use thiserror::Error;

use crate::ara::{AraError, AraExpr, DatabaseSchema};
use crate::bridge::{COL_PREFIX, MID_PREFIX, ROW_PREFIX};
use crate::kdata::{Attribute, RelationSchema};
use crate::matlang::{MatrixSchema, MlError, MlExpr};

/// A diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Plus,
    Star,
    DotStar,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Int(n) => write!(f, "{n}"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Star => f.write_str("'*'"),
            Tok::DotStar => f.write_str("'.*'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let mut width = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
                continue;
            }
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '.' if chars.get(i + 1) == Some(&'*') => {
                width = 2;
                Tok::DotStar
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                width = 2;
                Tok::Arrow
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while chars.get(i + width).is_some_and(char::is_ascii_digit) {
                    width += 1;
                }
                let s: String = chars[start..start + width].iter().collect();
                Tok::Int(s.parse().map_err(|_| err(line, column, format!("integer {s} is too large")))?)
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while chars.get(i + width).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                    width += 1;
                }
                Tok::Ident(chars[start..start + width].iter().collect())
            }
            c => return Err(err(line, column, format!("unexpected character {c:?}"))),
        };
        out.push((tok, pos));
        i += width;
        column += width;
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Cursor {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Cursor { toks: lex(text)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_at(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos(), message)
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(self.error(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(self.error_at(p, format!("expected {what}, found {t}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.error(format!("unexpected {t} after expression"))),
        }
    }

    /// A comma-separated list between braces, with `item` parsing one entry.
    fn braced_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.bump() {
                (Tok::RBrace, _) => return Ok(out),
                (Tok::Comma, p) => {
                    if *self.peek() == Tok::RBrace {
                        return Err(self.error_at(p, "trailing comma in list"));
                    }
                }
                (t, p) => return Err(self.error_at(p, format!("expected ',' or '}}', found {t}"))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ARA

const ARA_KEYWORDS: [&str; 6] = ["one", "proj", "sel", "ren", "comp", "join"];

/// Resolves an attribute name through the catalog; the reserved prefixes of
/// the matrix encoding resolve to the sort they name.
pub fn resolve_attribute(db: &DatabaseSchema, name: &str) -> Option<Attribute> {
    if let Some(a) = db.attribute(name) {
        return Some(a.clone());
    }
    [ROW_PREFIX, COL_PREFIX, MID_PREFIX]
        .iter()
        .find_map(|p| name.strip_prefix(p).filter(|s| !s.is_empty()).map(|s| Attribute::new(name, s)))
}

pub fn parse_ara(text: &str, db: &DatabaseSchema) -> Result<AraExpr, ParseError> {
    let mut p = AraParser {
        cur: Cursor::new(text)?,
        db,
    };
    let e = p.expr()?;
    p.cur.finish()?;
    Ok(e)
}

struct AraParser<'a> {
    cur: Cursor,
    db: &'a DatabaseSchema,
}

impl AraParser<'_> {
    fn typed(&self, pos: Pos, r: Result<AraExpr, AraError>) -> Result<AraExpr, ParseError> {
        r.map_err(|e| self.cur.error_at(pos, e.to_string()))
    }

    fn expr(&mut self) -> Result<AraExpr, ParseError> {
        let mut e = self.term()?;
        while *self.cur.peek() == Tok::Plus {
            let pos = self.cur.bump().1;
            let rhs = self.term()?;
            e = self.typed(pos, AraExpr::union(e, rhs))?;
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<AraExpr, ParseError> {
        let mut e = self.atom()?;
        while *self.cur.peek() == Tok::Ident("join".into()) {
            let pos = self.cur.bump().1;
            let rhs = self.atom()?;
            e = self.typed(pos, AraExpr::join(e, rhs))?;
        }
        Ok(e)
    }

    fn attr(&mut self) -> Result<Attribute, ParseError> {
        let (name, pos) = self.cur.ident("an attribute")?;
        resolve_attribute(self.db, &name).ok_or_else(|| self.cur.error_at(pos, format!("unknown attribute {name:?}")))
    }

    fn attrs(&mut self) -> Result<RelationSchema, ParseError> {
        let pos = self.cur.pos();
        let v = self.cur.braced_list(|c| {
            let (name, pos) = c.ident("an attribute")?;
            Ok((name, pos))
        })?;
        let mut attrs = Vec::with_capacity(v.len());
        for (name, p) in v {
            attrs.push(resolve_attribute(self.db, &name).ok_or_else(|| self.cur.error_at(p, format!("unknown attribute {name:?}")))?);
        }
        RelationSchema::new(attrs).map_err(|e| self.cur.error_at(pos, e.to_string()))
    }

    fn parenthesized(&mut self) -> Result<AraExpr, ParseError> {
        self.cur.expect(Tok::LParen)?;
        let e = self.expr()?;
        self.cur.expect(Tok::RParen)?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<AraExpr, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => self.parenthesized(),
            Tok::Ident(name) => {
                let call = matches!(self.cur.peek2(), Tok::LParen | Tok::LBrace);
                if !ARA_KEYWORDS.contains(&name.as_str()) || !call {
                    if name == "join" {
                        return Err(self.cur.error("expected an expression, found \"join\""));
                    }
                    self.cur.bump();
                    return self.typed(pos, AraExpr::rel(self.db, &name));
                }
                self.cur.bump();
                match name.as_str() {
                    "one" => Ok(AraExpr::one(self.parenthesized()?)),
                    "proj" => {
                        let y = self.attrs()?;
                        let e = self.parenthesized()?;
                        self.typed(pos, AraExpr::project(y, e))
                    }
                    "sel" => {
                        let y = self.attrs()?;
                        let e = self.parenthesized()?;
                        self.typed(pos, AraExpr::select(y, e))
                    }
                    "ren" => {
                        let pairs = self.cur.braced_list(|c| {
                            let a = c.ident("an attribute")?;
                            c.expect(Tok::Arrow)?;
                            let b = c.ident("an attribute")?;
                            Ok((a, b))
                        })?;
                        let mut resolved = Vec::with_capacity(pairs.len());
                        for ((a, pa), (b, pb)) in pairs {
                            let ra = resolve_attribute(self.db, &a)
                                .ok_or_else(|| self.cur.error_at(pa, format!("unknown attribute {a:?}")))?;
                            let rb = resolve_attribute(self.db, &b)
                                .ok_or_else(|| self.cur.error_at(pb, format!("unknown attribute {b:?}")))?;
                            resolved.push((ra, rb));
                        }
                        let e = self.parenthesized()?;
                        self.typed(pos, AraExpr::rename_some(resolved, e))
                    }
                    "comp" => {
                        self.cur.expect(Tok::LBrace)?;
                        let a = self.attr()?;
                        self.cur.expect(Tok::Comma)?;
                        let k = match self.cur.bump() {
                            (Tok::Int(k), _) => k as usize,
                            (t, p) => return Err(self.cur.error_at(p, format!("expected an integer, found {t}"))),
                        };
                        self.cur.expect(Tok::RBrace)?;
                        self.cur.expect(Tok::LParen)?;
                        let mut args = vec![self.expr()?];
                        while *self.cur.peek() == Tok::Comma {
                            self.cur.bump();
                            args.push(self.expr()?);
                        }
                        self.cur.expect(Tok::RParen)?;
                        self.typed(pos, AraExpr::compose(a, k, args))
                    }
                    _ => unreachable!("keyword list"),
                }
            }
            t => Err(self.cur.error(format!("expected an expression, found {t}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// MATLANG

const ML_KEYWORDS: [&str; 3] = ["t", "ones", "diag"];

pub fn parse_ml(text: &str, schema: &MatrixSchema) -> Result<MlExpr, ParseError> {
    let mut p = MlParser {
        cur: Cursor::new(text)?,
        schema,
    };
    let e = p.expr()?;
    p.cur.finish()?;
    Ok(e)
}

struct MlParser<'a> {
    cur: Cursor,
    schema: &'a MatrixSchema,
}

impl MlParser<'_> {
    fn typed(&self, pos: Pos, r: Result<MlExpr, MlError>) -> Result<MlExpr, ParseError> {
        r.map_err(|e| self.cur.error_at(pos, e.to_string()))
    }

    fn expr(&mut self) -> Result<MlExpr, ParseError> {
        let mut e = self.term()?;
        while *self.cur.peek() == Tok::Plus {
            let pos = self.cur.bump().1;
            let rhs = self.term()?;
            e = self.typed(pos, MlExpr::add(e, rhs))?;
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<MlExpr, ParseError> {
        let mut e = self.atom()?;
        loop {
            let hadamard = match self.cur.peek() {
                Tok::Star => false,
                Tok::DotStar => true,
                _ => return Ok(e),
            };
            let pos = self.cur.bump().1;
            let rhs = self.atom()?;
            e = if hadamard {
                self.typed(pos, MlExpr::hadamard(e, rhs))?
            } else {
                self.typed(pos, MlExpr::matmul(e, rhs))?
            };
        }
    }

    fn atom(&mut self) -> Result<MlExpr, ParseError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => {
                self.cur.bump();
                let e = self.expr()?;
                self.cur.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.cur.bump();
                if !ML_KEYWORDS.contains(&name.as_str()) || *self.cur.peek() != Tok::LParen {
                    return self.typed(pos, MlExpr::var(self.schema, &name));
                }
                self.cur.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.cur.expect(Tok::RParen)?;
                match name.as_str() {
                    "t" => Ok(MlExpr::transpose(inner)),
                    "ones" => Ok(MlExpr::ones(inner)),
                    _ => self.typed(pos, MlExpr::diag(inner)),
                }
            }
            t => Err(self.cur.error(format!("expected an expression, found {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlang::{Shape, SizeTerm};

    fn db() -> DatabaseSchema {
        let a = |n: &str| Attribute::new(n, "s");
        DatabaseSchema::from_relations([
            ("R", RelationSchema::new([a("A"), a("B")]).unwrap()),
            ("S", RelationSchema::new([a("B"), a("C")]).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn ara_round_trip() {
        let db = db();
        for text in [
            "R",
            "R + R join R",
            "(R + R) join R",
            "R join (S join S)",
            "proj{A}(R join S)",
            "sel{A,B}(R)",
            "ren{A->C}(R)",
            "comp{B,2}(R, S)",
            "one(proj{}(R))",
        ] {
            let e = parse_ara(text, &db).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse_ara(&e.to_string(), &db).unwrap(), e);
        }
    }

    #[test]
    fn ara_errors_carry_positions() {
        let db = db();
        let err = parse_ara("sel{A,}(R)", &db).unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        let err = parse_ara("R +\n  Q", &db).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(parse_ara("R + S", &db).unwrap_err().message.contains("schema"));
        assert!(parse_ara("proj{Z}(R)", &db).is_err());
        assert!(parse_ara("R R", &db).is_err());
    }

    #[test]
    fn reserved_prefixes_resolve_to_their_sort() {
        let db = DatabaseSchema::new();
        assert_eq!(resolve_attribute(&db, "_mid_n").unwrap().sort(), "n");
        assert_eq!(resolve_attribute(&db, "row_m").unwrap().sort(), "m");
        assert!(resolve_attribute(&db, "other").is_none());
    }

    #[test]
    fn ml_round_trip() {
        let schema = MatrixSchema::from_vars([
            ("M", Shape::new(SizeTerm::named("a"), SizeTerm::named("b"))),
            ("t", Shape::new(SizeTerm::named("a"), SizeTerm::named("a"))),
        ]);
        for text in ["ones(M) * t(ones(M))", "M + M .* M", "(M + M) .* M", "t .* t(t) * t", "diag(ones(M))"] {
            let e = parse_ml(text, &schema).unwrap();
            assert_eq!(e.to_string(), text);
        }
        let e = parse_ml("ones(M) * t(ones(M))", &schema).unwrap();
        assert_eq!(e.shape(), &Shape::new(SizeTerm::named("a"), SizeTerm::named("a")));
        let err = parse_ml("M * M", &schema).unwrap_err();
        assert_eq!(err.column, 3);
    }
}
