//! Text format for operators.
//!
//! ```text
//! # comments run to end of line
//! operator n=3
//! T1 := min(avg(0.5:x1, 0.5:x2), -1 + avg(0.5:x1, 0.5:x3))
//! T2 := min(1 + avg(0.5:x1, 0.5:x3), max(avg(0.5:x1, 0.5:x2), -3 + x3))
//! T3 := max(1 + avg(0.5:x1, 0.5:x3), x3)
//! ```
//!
//! One coordinate per line, in order. Grammar, informally:
//!
//! ```text
//! expr  := xJ
//!        | NUM + expr                      (additive shift)
//!        | min(expr, ...) | max(expr, ...)
//!        | avg(NUM:expr, ...)              (weights > 0, sum to 1)
//!        | mean(R; NUM:expr, ...)          (R real or +inf / -inf)
//!        | supmix(expr, expr) | infmix(expr, expr)
//! ```
//!
//! [`print_operator`] emits this canonical form; parsing its output
//! reproduces the operator exactly.

use crate::expr::{Expr, ExtValue, Operator};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Semicolon,
    Plus,
    Minus,
    Assign,
    Equals,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Colon => write!(f, "':'"),
            Tok::Semicolon => write!(f, "';'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Assign => write!(f, "':='"),
            Tok::Equals => write!(f, "'='"),
        }
    }
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '#' => break,
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semicolon, col));
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, col));
                i += 1;
            }
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Assign, col));
                    i += 2;
                } else {
                    toks.push((Tok::Colon, col));
                    i += 1;
                }
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text.parse().map_err(|_| {
                    ParseError::new(line_no, start + 1, format!("bad number '{text}'"))
                })?;
                toks.push((Tok::Num(v), start + 1));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                toks.push((Tok::Ident(text), start + 1));
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character '{other}'"),
                ));
            }
        }
    }
    Ok(toks)
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.toks.last().map(|(_, c)| c + 1).unwrap_or(1))
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message)
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of line"))),
        }
    }

    fn expect_num(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            Some(t) => Err(self.err(format!("expected a number, found {t}"))),
            None => Err(self.err("expected a number, found end of line")),
        }
    }

    /// NUM, possibly preceded by a sign.
    fn signed_num(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.expect_num()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.expect_num()
            }
            _ => self.expect_num(),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) | Some(Tok::Minus) | Some(Tok::Plus) => {
                let c = self.signed_num()?;
                self.expect(&Tok::Plus)?;
                let child = self.parse_expr()?;
                Ok(Expr::shift(c, child))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "min" | "max" => {
                        let children = self.paren_list(Self::parse_expr)?;
                        Ok(if name == "min" {
                            Expr::min(children)
                        } else {
                            Expr::max(children)
                        })
                    }
                    "avg" => {
                        let items = self.paren_list(Self::parse_weighted)?;
                        Ok(Expr::avg(items))
                    }
                    "mean" => {
                        self.expect(&Tok::LParen)?;
                        let r = self.parse_mean_parameter()?;
                        self.expect(&Tok::Semicolon)?;
                        let mut items = vec![self.parse_weighted()?];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            items.push(self.parse_weighted()?);
                        }
                        self.expect(&Tok::RParen)?;
                        Ok(Expr::mean(r, items))
                    }
                    "supmix" | "infmix" => {
                        let children = self.paren_list(Self::parse_expr)?;
                        if children.len() != 2 {
                            return Err(self.err(format!(
                                "{name} takes exactly 2 arguments, got {}",
                                children.len()
                            )));
                        }
                        let mut it = children.into_iter();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        Ok(if name == "supmix" {
                            Expr::supmix(a, b)
                        } else {
                            Expr::infmix(a, b)
                        })
                    }
                    _ => {
                        if let Some(idx) = name.strip_prefix('x') {
                            if let Ok(j) = idx.parse::<usize>() {
                                if j >= 1 {
                                    return Ok(Expr::var(j - 1));
                                }
                            }
                        }
                        Err(self.err(format!(
                            "unknown name '{name}' (expected xJ, min, max, avg, mean, supmix or infmix)"
                        )))
                    }
                }
            }
            Some(t) => Err(self.err(format!("expected an expression, found {t}"))),
            None => Err(self.err("expected an expression, found end of line")),
        }
    }

    fn parse_weighted(&mut self) -> Result<(f64, Expr), ParseError> {
        let w = self.signed_num()?;
        self.expect(&Tok::Colon)?;
        let e = self.parse_expr()?;
        Ok((w, e))
    }

    fn parse_mean_parameter(&mut self) -> Result<ExtValue, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "inf" => {
                self.pos += 1;
                Ok(ExtValue::PosInf)
            }
            Some(Tok::Plus) | Some(Tok::Minus) => {
                let neg = self.peek() == Some(&Tok::Minus);
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Ident(s)) if s == "inf" => {
                        self.pos += 1;
                        Ok(if neg { ExtValue::NegInf } else { ExtValue::PosInf })
                    }
                    Some(Tok::Num(v)) => {
                        self.pos += 1;
                        Ok(ExtValue::Finite(if neg { -v } else { v }))
                    }
                    _ => Err(self.err("expected a number or 'inf' after sign")),
                }
            }
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(ExtValue::Finite(v))
            }
            _ => Err(self.err("expected a mean parameter (real, +inf or -inf)")),
        }
    }

    fn paren_list<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut out = vec![item(self)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(item(self)?);
        }
        self.expect(&Tok::RParen)?;
        Ok(out)
    }
}

/// Parses an operator description. Errors carry 1-based line and column.
pub fn parse_operator(text: &str) -> Result<Operator, ParseError> {
    // logical lines: (original line number, tokens), comments stripped
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let toks = lex_line(raw, idx + 1)?;
        if !toks.is_empty() {
            lines.push((idx + 1, toks));
        }
    }
    let mut it = lines.into_iter();

    // header: operator n=<int>
    let (hline, htoks) = it
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "empty input: expected 'operator n=<dim>'"))?;
    let mut cur = Cursor { toks: &htoks, pos: 0, line: hline };
    match cur.next() {
        Some(Tok::Ident(s)) if s == "operator" => {}
        _ => return Err(ParseError::new(hline, 1, "expected 'operator n=<dim>'")),
    }
    match cur.next() {
        Some(Tok::Ident(s)) if s == "n" => {}
        _ => return Err(ParseError::new(hline, cur.col(), "expected 'n=<dim>'")),
    }
    cur.expect(&Tok::Equals)?;
    let n = match cur.next() {
        Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 1.0 && *v <= 64.0 => *v as usize,
        _ => {
            return Err(ParseError::new(
                hline,
                cur.col(),
                "dimension must be an integer between 1 and 64",
            ))
        }
    };
    if cur.peek().is_some() {
        return Err(cur.err("unexpected trailing tokens after header"));
    }

    // coordinate lines T1 := ..., in order
    let mut coords = Vec::with_capacity(n);
    for i in 1..=n {
        let (cline, ctoks) = it.next().ok_or_else(|| {
            ParseError::new(hline, 1, format!("expected {n} coordinate lines, found {}", i - 1))
        })?;
        let mut cur = Cursor { toks: &ctoks, pos: 0, line: cline };
        match cur.next() {
            Some(Tok::Ident(s)) if *s == format!("T{i}") => {}
            _ => {
                return Err(ParseError::new(
                    cline,
                    1,
                    format!("expected 'T{i} := <expr>' (coordinates in order)"),
                ))
            }
        }
        cur.expect(&Tok::Assign)?;
        let mut expr = cur.parse_expr()?;
        if cur.peek().is_some() {
            return Err(cur.err("unexpected trailing tokens after expression"));
        }
        crate::expr::validate_expr(&mut expr, n)
            .map_err(|e| ParseError::new(cline, 1, e.to_string()))?;
        coords.push(expr);
    }
    if let Some((l, _)) = it.next() {
        return Err(ParseError::new(l, 1, "unexpected content after last coordinate"));
    }

    Operator::new(n, coords).map_err(|e| ParseError::new(hline, 1, e.to_string()))
}

impl std::str::FromStr for Operator {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_operator(s)
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    use std::fmt::Write;
    match e {
        Expr::Var(j) => {
            let _ = write!(out, "x{}", j + 1);
        }
        Expr::Shift(c, child) => {
            let _ = write!(out, "{c} + ");
            write_expr(child, out);
        }
        Expr::Min(children) | Expr::Max(children) => {
            out.push_str(if matches!(e, Expr::Min(_)) { "min(" } else { "max(" });
            for (k, c) in children.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_expr(c, out);
            }
            out.push(')');
        }
        Expr::Avg(items) => {
            out.push_str("avg(");
            for (k, (w, c)) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{w}:");
                write_expr(c, out);
            }
            out.push(')');
        }
        Expr::Mean(r, items) => {
            let _ = write!(out, "mean({r}; ");
            for (k, (w, c)) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{w}:");
                write_expr(c, out);
            }
            out.push(')');
        }
        Expr::SupMix(a, b) | Expr::InfMix(a, b) => {
            out.push_str(if matches!(e, Expr::SupMix(_, _)) {
                "supmix("
            } else {
                "infmix("
            });
            write_expr(a, out);
            out.push_str(", ");
            write_expr(b, out);
            out.push(')');
        }
    }
}

/// Renders the canonical text form; [`parse_operator`] inverts it exactly.
pub fn print_operator(op: &Operator) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "operator n={}", op.n());
    for (i, e) in op.coords().iter().enumerate() {
        let _ = write!(out, "T{} := ", i + 1);
        write_expr(e, &mut out);
        out.push('\n');
    }
    out
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_operator(self))
    }
}
