//! Text form of polynomials, used in config files and on the command line.
//!
//! ```text
//! expression := ['+'|'-'] term (('+'|'-') term)*
//! term       := factor ('*' factor)*
//! factor     := scalar | variable | variable '^' int | '(' expression ')'
//! variable   := 'X' int | 'X' int '*'
//! scalar     := decimal | decimal 'i'
//! ```
//!
//! A `*` written directly after a variable index is the adjoint marker unless
//! the next non-blank character starts a factor (`X`, a digit, `.` or `(`),
//! in which case it is a product. So `X1*X2` is a product and `X1**X2` is
//! `X1*` times `X2`. Products keep their written order.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::ncpoly::{Letter, NCPoly, Word};

const MAX_DEPTH: usize = 128;
const MAX_EXPONENT: u64 = 1024;
const MAX_TERMS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    /// Variable index outside `1..=nvars`.
    Arity { index: u64, nvars: usize },
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::Arity { index, nvars } => {
                write!(f, "variable X{index} exceeds the {nvars} declared variables")
            }
            ParseErrorKind::Domain(msg) => write!(f, "{msg}"),
        }
    }
}

/// Polynomial text together with the number of variables it lives over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySource {
    pub text: String,
    pub nvars: usize,
}

impl PolySource {
    pub fn new(text: impl Into<String>, nvars: usize) -> Self {
        PolySource {
            text: text.into(),
            nvars,
        }
    }

    pub fn parse(&self) -> Result<NCPoly, ParseError> {
        parse_poly(&self.text, self.nvars)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Real(f64),
    Imag(f64),
    Int(u64),
    Var { index: u64, starred: bool },
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    bytes: &'a [u8],
    at: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            bytes: text.as_bytes(),
            at: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.at).copied()
    }

    fn bump(&mut self) {
        if let Some(b) = self.peek() {
            self.at += 1;
            if b == b'\n' {
                self.line += 1;
                self.column = 1;
            } else if b & 0xC0 != 0x80 {
                // count characters, not UTF-8 continuation bytes
                self.column += 1;
            }
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn err(&self, pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    fn skip_blank(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.at;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.bump();
        }
        std::str::from_utf8(&self.bytes[start..self.at]).expect("ascii digits")
    }

    fn next_starts_factor(&self) -> bool {
        let rest = &self.bytes[self.at..];
        let next = rest
            .iter()
            .copied()
            .find(|b| !matches!(b, b' ' | b'\t' | b'\n' | b'\r'));
        matches!(next, Some(b'X' | b'0'..=b'9' | b'.' | b'('))
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_blank();
            let pos = self.pos();
            let Some(b) = self.peek() else {
                out.push((Tok::End, pos));
                return Ok(out);
            };
            let tok = match b {
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'X' => {
                    self.bump();
                    let digits = self.digits();
                    if digits.is_empty() {
                        return Err(self.err(
                            self.pos(),
                            ParseErrorKind::Syntax("expected a variable index after 'X'".into()),
                        ));
                    }
                    let index: u64 = digits.parse().map_err(|_| {
                        self.err(pos, ParseErrorKind::Syntax("variable index too large".into()))
                    })?;
                    let mut starred = false;
                    if self.peek() == Some(b'*') {
                        let save = (self.at, self.line, self.column);
                        self.bump();
                        if self.next_starts_factor() {
                            (self.at, self.line, self.column) = save;
                        } else {
                            starred = true;
                        }
                    }
                    Tok::Var { index, starred }
                }
                b'0'..=b'9' | b'.' => self.number(pos)?,
                _ => {
                    let shown = std::str::from_utf8(&self.bytes[self.at..])
                        .ok()
                        .and_then(|s| s.chars().next())
                        .map(|c| format!("{c:?}"))
                        .unwrap_or_else(|| format!("byte 0x{b:02x}"));
                    return Err(self.err(
                        pos,
                        ParseErrorKind::Syntax(format!("unexpected character {shown}")),
                    ));
                }
            };
            out.push((tok, pos));
        }
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        let start = self.at;
        let int_part = self.digits().len();
        let mut is_int = true;
        let mut frac_part = 0;
        if self.peek() == Some(b'.') {
            is_int = false;
            self.bump();
            frac_part = self.digits().len();
        }
        if int_part == 0 && frac_part == 0 {
            return Err(self.err(pos, ParseErrorKind::Syntax("malformed number".into())));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            is_int = false;
            self.bump();
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.bump();
            }
            if self.digits().is_empty() {
                return Err(self.err(
                    self.pos(),
                    ParseErrorKind::Syntax("expected exponent digits".into()),
                ));
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.at]).expect("ascii number");
        let imaginary = self.peek() == Some(b'i');
        if imaginary {
            self.bump();
        }
        if is_int && !imaginary {
            if let Ok(v) = text.parse::<u64>() {
                return Ok(Tok::Int(v));
            }
        }
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(pos, ParseErrorKind::Syntax("malformed number".into())))?;
        if !value.is_finite() {
            return Err(self.err(pos, ParseErrorKind::Domain("number out of range".into())));
        }
        Ok(if imaginary {
            Tok::Imag(value)
        } else {
            Tok::Real(value)
        })
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    nvars: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(self.pos(), ParseErrorKind::Syntax(msg.into()))
    }

    fn guard(&self, p: NCPoly, pos: Pos) -> Result<NCPoly, ParseError> {
        if p.num_terms() > MAX_TERMS {
            Err(self.err(pos, ParseErrorKind::Domain("expression expands to too many terms".into())))
        } else {
            Ok(p)
        }
    }

    fn expression(&mut self) -> Result<NCPoly, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(self.pos(), ParseErrorKind::Domain("nesting too deep".into())));
        }
        let negate_first = match self.peek() {
            Tok::Minus => {
                self.advance();
                true
            }
            Tok::Plus => {
                self.advance();
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate_first { -&first } else { first };
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.guard(&acc + &t, pos)?;
                }
                Tok::Minus => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.guard(&acc - &t, pos)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<NCPoly, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            let pos = self.pos();
            self.advance();
            let f = self.factor()?;
            acc = self.guard(&acc * &f, pos)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NCPoly, ParseError> {
        let pos = self.pos();
        match self.advance() {
            Tok::Real(v) => Ok(NCPoly::constant(self.nvars, Complex64::new(v, 0.0))),
            Tok::Int(v) => Ok(NCPoly::constant(self.nvars, Complex64::new(v as f64, 0.0))),
            Tok::Imag(v) => Ok(NCPoly::constant(self.nvars, Complex64::new(0.0, v))),
            Tok::Var { index, starred } => {
                if index == 0 || index > self.nvars as u64 {
                    return Err(self.err(
                        pos,
                        ParseErrorKind::Arity {
                            index,
                            nvars: self.nvars,
                        },
                    ));
                }
                let letter = Letter::new(index as usize, starred);
                let mut power = 1u64;
                if *self.peek() == Tok::Caret {
                    self.advance();
                    let epos = self.pos();
                    power = match self.advance() {
                        Tok::Int(k) => k,
                        Tok::Minus => {
                            return Err(self.err(
                                epos,
                                ParseErrorKind::Domain("exponent must be non-negative".into()),
                            ))
                        }
                        _ => {
                            return Err(self.err(
                                epos,
                                ParseErrorKind::Syntax("expected an integer exponent".into()),
                            ))
                        }
                    };
                    if power > MAX_EXPONENT {
                        return Err(self.err(
                            epos,
                            ParseErrorKind::Domain(format!("exponent exceeds {MAX_EXPONENT}")),
                        ));
                    }
                }
                let word = Word::new(vec![letter; power as usize]);
                Ok(NCPoly::monomial(self.nvars, word, Complex64::new(1.0, 0.0))
                    .expect("index checked above"))
            }
            Tok::LParen => {
                let inner = self.expression()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax("expected ')'"));
                }
                self.advance();
                Ok(inner)
            }
            Tok::End => Err(self.err(pos, ParseErrorKind::Syntax("unexpected end of input".into()))),
            other => Err(self.err(
                pos,
                ParseErrorKind::Syntax(format!("expected a factor, found {}", describe(&other))),
            )),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::End => "end of input",
        _ => "a value",
    }
}

/// Parses polynomial text over `nvars` variables.
pub fn parse_poly(text: &str, nvars: usize) -> Result<NCPoly, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        toks,
        at: 0,
        nvars,
        depth: 0,
    };
    let p = parser.expression()?;
    if *parser.peek() != Tok::End {
        return Err(parser.syntax(format!(
            "unexpected {} after expression",
            describe(parser.peek())
        )));
    }
    Ok(p)
}

/// Deterministic rendering in the grammar above; `parse_poly` inverts it.
pub fn print_poly(p: &NCPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (word, c)) in p.terms().enumerate() {
        let (negative, body) = coefficient_body(*c);
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        match (body.as_str(), word.is_empty()) {
            (b, true) => out.push_str(b),
            ("1", false) => out.push_str(&word.to_string()),
            (b, false) => {
                out.push_str(b);
                out.push('*');
                out.push_str(&word.to_string());
            }
        }
    }
    out
}

fn coefficient_body(c: Complex64) -> (bool, String) {
    if c.im == 0.0 {
        (c.re < 0.0, format!("{}", c.re.abs()))
    } else if c.re == 0.0 {
        (c.im < 0.0, format!("{}i", c.im.abs()))
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        (false, format!("({}{}{}i)", c.re, sign, c.im.abs()))
    }
}
