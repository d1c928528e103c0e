//! Lexer and recursive-descent parser for the Lagrangian grammar.
//!
//! Precedence, loosest to tightest: `+ -`, `* /`, unary `-`, `^`
//! (right-associative). Every error carries the byte offset it was raised at
//! and the token set that would have been accepted there.

use std::fmt;

use super::ast::{BinOp, ExprKind, ExprNode, Func, LagrangianExpr, Span};

#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let Some(&c) = lx.src.get(lx.pos) else {
                out.push((Tok::Eof, (start, start)));
                return Ok(out);
            };
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' | b'.' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(),
                _ => {
                    return Err(ParseError {
                        offset: start,
                        found: format!("'{}'", c as char),
                        expected: vec!["number", "identifier", "operator", "'('", "')'"],
                    })
                }
            };
            out.push((tok, (start, lx.pos)));
        }
    }

    fn skip_ws(&mut self) {
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // the 'e' belongs to an identifier-free tail; reject below
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Tok::Num).map_err(|_| ParseError {
            offset: start,
            found: format!("'{text}'"),
            expected: vec!["number"],
        })
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: Vec<&'static str>) -> ParseError {
        let (tok, span) = self.peek();
        ParseError {
            offset: span.0,
            found: tok.to_string(),
            expected,
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = (lhs.span.0, rhs.span.1);
            lhs = ExprNode {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = (lhs.span.0, rhs.span.1);
            lhs = ExprNode {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn unary(&mut self) -> Result<ExprNode, ParseError> {
        if matches!(self.peek().0, Tok::Minus) {
            let (_, span) = self.bump();
            let inner = self.unary()?;
            let full = (span.0, inner.span.1);
            return Ok(ExprNode {
                kind: ExprKind::Neg(Box::new(inner)),
                span: full,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek().0, Tok::Caret) {
            self.bump();
            // right-associative, and the exponent may carry a unary minus
            let exp = self.unary()?;
            let span = (base.span.0, exp.span.1);
            return Ok(ExprNode {
                kind: ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)),
                span,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek().0.clone() {
            Tok::Num(v) => {
                let (_, span) = self.bump();
                Ok(ExprNode {
                    kind: ExprKind::Const(v),
                    span,
                })
            }
            Tok::LParen => {
                let (_, open) = self.bump();
                let inner = self.expr()?;
                if !matches!(self.peek().0, Tok::RParen) {
                    return Err(self.err(vec!["')'"]));
                }
                let (_, close) = self.bump();
                Ok(ExprNode {
                    kind: inner.kind,
                    span: (open.0, close.1),
                })
            }
            Tok::Ident(name) => {
                let (_, span) = self.bump();
                if let Some(func) = Func::from_name(&name) {
                    if !matches!(self.peek().0, Tok::LParen) {
                        return Err(self.err(vec!["'('"]));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if !matches!(self.peek().0, Tok::RParen) {
                        return Err(self.err(vec!["')'"]));
                    }
                    let (_, close) = self.bump();
                    return Ok(ExprNode {
                        kind: ExprKind::Call(func, Box::new(arg)),
                        span: (span.0, close.1),
                    });
                }
                self.variable(&name, span)
            }
            _ => Err(self.err(vec!["number", "identifier", "'('", "'-'"])),
        }
    }

    fn variable(&self, name: &str, span: Span) -> Result<ExprNode, ParseError> {
        let kind = match name {
            "t" => ExprKind::Time,
            "x" if self.dim == 1 => ExprKind::X(0),
            "y" if self.dim == 1 => ExprKind::Y(0),
            _ => {
                let (head, tail) = name.split_at(1);
                let index = tail.parse::<usize>().ok().filter(|&k| k >= 1);
                match (head, index) {
                    ("x", Some(k)) | ("y", Some(k)) => {
                        if k > self.dim {
                            return Err(ParseError {
                                offset: span.0,
                                found: format!("'{name}' (index {k} exceeds dimension {})", self.dim),
                                expected: vec!["variable index <= dimension"],
                            });
                        }
                        if head == "x" {
                            ExprKind::X(k - 1)
                        } else {
                            ExprKind::Y(k - 1)
                        }
                    }
                    _ => {
                        return Err(ParseError {
                            offset: span.0,
                            found: format!("'{name}'"),
                            expected: vec![
                                "t", "x<i>", "y<i>", "abs", "sin", "cos", "exp", "ln", "sqrt",
                                "gamma",
                            ],
                        })
                    }
                }
            }
        };
        Ok(ExprNode { kind, span })
    }
}

/// Parses `src` as a Lagrangian over `t, x1..xn, y1..yn`.
pub fn parse_lagrangian(src: &str, n: usize) -> Result<LagrangianExpr, ParseError> {
    if n == 0 {
        return Err(ParseError {
            offset: 0,
            found: "dimension 0".to_string(),
            expected: vec!["dimension >= 1"],
        });
    }
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, pos: 0, dim: n };
    let root = p.expr()?;
    if !matches!(p.peek().0, Tok::Eof) {
        return Err(p.err(vec!["operator", "end of input"]));
    }
    Ok(LagrangianExpr::new(root, n, src.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_spec_grammar() {
        assert!(parse_lagrangian("y^3", 1).is_ok());
        assert!(parse_lagrangian("y^5 + abs(y)", 1).is_ok());
        assert!(parse_lagrangian("0.5*y1^2 + sin(t)*x2 - y2/2", 2).is_ok());
        assert!(parse_lagrangian("gamma(1.5) * sqrt(x) - exp(-t)", 1).is_ok());
        assert!(parse_lagrangian("1e-3 * y", 1).is_ok());
    }

    #[test]
    fn rejects_index_beyond_dimension() {
        let err = parse_lagrangian("x3", 2).unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.found.contains("exceeds dimension"));
    }

    #[test]
    fn rejects_bare_xy_in_vector_mode() {
        assert!(parse_lagrangian("x + y", 2).is_err());
        assert!(parse_lagrangian("x1 + y2", 2).is_ok());
    }

    #[test]
    fn trailing_caret_reports_offset() {
        let err = parse_lagrangian("y^", 1).unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn unknown_identifier_reports_offset() {
        let err = parse_lagrangian("y + foo(t)", 1).unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn unbalanced_paren() {
        let err = parse_lagrangian("sin(t", 1).unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(err.expected, vec!["')'"]);
    }

    #[test]
    fn power_is_right_associative_and_tighter_than_neg() {
        // -y^2 at y=3 must evaluate to -9, and 2^3^2 to 512; checked in eval tests,
        // here just make sure both parse
        assert!(parse_lagrangian("-y^2", 1).is_ok());
        assert!(parse_lagrangian("2^3^2", 1).is_ok());
    }
}
