//! Text front end for expressions.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := '-' unary | power
//! power   := primary ['^' INT]
//! primary := INT | '(' expr ')' | jet | indep | param | func | binding
//! jet     := ('u'|'v') ['_' letters]           letters: x, y, t with optional counts (u_x6)
//! func    := NAME ['_' letters | '_{' arg['^' INT] (',' ...)* '}'] '(' [arg (',' arg)*] ')'
//! ```
//!
//! Division is only by a unit scalar: a nonzero rational, `sigma`, or products of these.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::coeffring::{Param, ParamScalar, Rational};
use crate::error::{Error, Result};

use super::expr::{Expr, JetMonomial};
use super::func::{Arg, UnknownFunc};
use super::jet::{DepVar, Indep, JetVar, MultiIndex};

/// Named subexpressions available while parsing (e.g. `F` and `J`).
pub type Bindings = BTreeMap<String, Expr>;

const RESERVED: [&str; 10] = ["u", "v", "x", "y", "t", "c", "e", "f", "g", "sigma"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident { name: String, suffix: Option<Suffix> },
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    End,
}

#[derive(Clone, Debug, PartialEq)]
enum Suffix {
    Letters(String, usize),
    Braced(String, usize),
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(syntax(i, "missing operator after number"));
            }
            out.push((Tok::Int(text[start..i].parse().unwrap()), start));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name = text[start..i].to_string();
            let mut suffix = None;
            if i < bytes.len() && bytes[i] == b'_' {
                i += 1;
                let s0 = i;
                if i < bytes.len() && bytes[i] == b'{' {
                    let close = text[i..]
                        .find('}')
                        .ok_or_else(|| syntax(i, "unterminated `{` in derivative suffix"))?;
                    suffix = Some(Suffix::Braced(text[i + 1..i + close].to_string(), i + 1));
                    i += close + 1;
                } else {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    if i == s0 {
                        return Err(syntax(s0, "empty derivative suffix"));
                    }
                    suffix = Some(Suffix::Letters(text[s0..i].to_string(), s0));
                }
            }
            out.push((Tok::Ident { name, suffix }, start));
            continue;
        }
        return Err(syntax(start, format!("unexpected character `{}`", c as char)));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// `x`, `xx`, `x6`, `x4y`, `tx` → multi-index.
fn parse_letters(s: &str, pos: usize) -> Result<MultiIndex> {
    let chars: Vec<char> = s.chars().collect();
    let mut m = [0u8; 3];
    let mut i = 0;
    while i < chars.len() {
        let d = Indep::from_letter(chars[i]).ok_or_else(|| {
            syntax(
                pos + i,
                format!("invalid derivative letter `{}` (expected x, y or t)", chars[i]),
            )
        })?;
        i += 1;
        let d0 = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let n: u32 = if i > d0 {
            chars[d0..i].iter().collect::<String>().parse().unwrap()
        } else {
            1
        };
        if n == 0 || n > 60 {
            return Err(syntax(pos + d0, "derivative count must be between 1 and 60"));
        }
        let slot = &mut m[d.index()];
        *slot = slot
            .checked_add(n as u8)
            .filter(|&v| v <= 60)
            .ok_or_else(|| syntax(pos, "derivative order too large"))?;
    }
    Ok(MultiIndex(m))
}

fn dep_of(name: &str) -> Option<DepVar> {
    match name {
        "u" => Some(DepVar::U),
        "v" => Some(DepVar::V),
        _ => None,
    }
}

/// Parses an argument name such as `x`, `u`, `u_xy`.
fn parse_arg(text: &str, pos: usize) -> Result<Arg> {
    let text = text.trim();
    let (name, suf) = match text.split_once('_') {
        Some((n, s)) => (n, Some(s)),
        None => (text, None),
    };
    if let Some(dep) = dep_of(name) {
        let idx = match suf {
            Some(s) => parse_letters(s, pos + name.len() + 1)?,
            None => MultiIndex::ZERO,
        };
        return Ok(Arg::Jet(JetVar::new(dep, idx)));
    }
    if name.len() == 1 {
        if let Some(d) = Indep::from_letter(name.chars().next().unwrap()) {
            if suf.is_some() {
                return Err(Error::JetOnNonDependent {
                    name: name.to_string(),
                    pos,
                });
            }
            return Ok(Arg::Indep(d));
        }
    }
    Err(syntax(pos, format!("invalid function argument `{text}`")))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    bindings: &'a Bindings,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    let inv = d
                        .as_scalar()
                        .and_then(|s| s.unit_inverse())
                        .ok_or_else(|| {
                            syntax(pos, format!("division only by a nonzero rational or sigma, not `{d}`"))
                        })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            match self.bump().0 {
                Tok::Int(n) => {
                    let n = n
                        .to_u32()
                        .filter(|&n| n <= 64)
                        .ok_or_else(|| syntax(pos, "exponent too large"))?;
                    return Ok(base.pow(n));
                }
                _ => return Err(syntax(pos, "exponent must be a nonnegative integer literal")),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::rational(Rational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident { name, suffix } => self.ident(name, suffix, pos),
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }

    fn ident(&mut self, name: String, suffix: Option<Suffix>, pos: usize) -> Result<Expr> {
        let is_call = *self.peek() == Tok::LParen;
        if let Some(dep) = dep_of(&name) {
            if is_call {
                return Err(syntax(pos, format!("`{name}` is a dependent variable, not a function")));
            }
            let idx = match suffix {
                None => MultiIndex::ZERO,
                Some(Suffix::Letters(s, p)) => parse_letters(&s, p)?,
                Some(Suffix::Braced(_, p)) => return Err(syntax(p, "braced suffix on a jet")),
            };
            return Ok(Expr::jet(JetVar::new(dep, idx)));
        }
        let non_dep = |name: &str| Error::JetOnNonDependent {
            name: name.to_string(),
            pos,
        };
        if let Some(p) = Param::from_name(&name) {
            if suffix.is_some() {
                return Err(non_dep(&name));
            }
            if is_call {
                return Err(syntax(pos, format!("`{name}` is a parameter, not a function")));
            }
            return Ok(Expr::param(p));
        }
        if name.len() == 1 {
            if let Some(d) = Indep::from_letter(name.chars().next().unwrap()) {
                if suffix.is_some() {
                    return Err(non_dep(&name));
                }
                if is_call {
                    return Err(syntax(pos, format!("`{name}` is a variable, not a function")));
                }
                return Ok(Expr::indep(d));
            }
        }
        if is_call {
            return self.call(name, suffix);
        }
        if let Some(e) = self.bindings.get(&name) {
            if suffix.is_some() {
                return Err(non_dep(&name));
            }
            return Ok(e.clone());
        }
        debug_assert!(!RESERVED.contains(&name.as_str()));
        Err(Error::UnknownSymbol { name, pos })
    }

    fn call(&mut self, name: String, suffix: Option<Suffix>) -> Result<Expr> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args: Vec<Arg> = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (tok, apos) = self.bump();
                let text = match tok {
                    Tok::Ident { name, suffix: None } => name,
                    Tok::Ident {
                        name,
                        suffix: Some(Suffix::Letters(s, _)),
                    } => format!("{name}_{s}"),
                    _ => return Err(syntax(apos, "expected a function argument")),
                };
                let a = parse_arg(&text, apos)?;
                if args.contains(&a) {
                    return Err(syntax(apos, format!("repeated argument `{a}`")));
                }
                args.push(a);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return Err(syntax(self.pos(), "expected `,` or `)`")),
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        let base = UnknownFunc::new(&name, &args);
        let mut derivs = vec![0u8; args.len()];
        match suffix {
            None => {}
            Some(Suffix::Letters(s, p)) => {
                let m = parse_letters(&s, p)?;
                for d in Indep::ALL {
                    let n = m.get(d);
                    if n == 0 {
                        continue;
                    }
                    let i = base.position(&Arg::Indep(d)).ok_or_else(|| {
                        syntax(p, format!("`{name}` does not depend on {d}"))
                    })?;
                    derivs[i] += n;
                }
            }
            Some(Suffix::Braced(s, p)) => {
                for entry in s.split(',') {
                    let (a, n) = match entry.split_once('^') {
                        Some((a, n)) => (
                            a,
                            n.trim()
                                .parse::<u8>()
                                .map_err(|_| syntax(p, format!("bad derivative power in `{entry}`")))?,
                        ),
                        None => (entry, 1),
                    };
                    let arg = parse_arg(a, p)?;
                    let i = base
                        .position(&arg)
                        .ok_or_else(|| syntax(p, format!("`{name}` does not depend on {arg}")))?;
                    derivs[i] += n;
                }
            }
        }
        Ok(Expr::func(base.with_derivs(&derivs)))
    }
}

/// Parses an expression in the text grammar.
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_with(text, &Bindings::new())
}

/// Parses with extra named subexpressions.
pub fn parse_expr_with(text: &str, bindings: &Bindings) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        bindings,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "trailing input"));
    }
    Ok(e)
}

/// Parses a product of jets such as `u^2*u_xx` (or `1`).
pub fn parse_jet_monomial(text: &str) -> Result<JetMonomial> {
    let e = parse_expr(text)?;
    let mut terms = e.terms();
    let (m, s) = terms
        .next()
        .ok_or_else(|| syntax(0, "empty jet monomial"))?;
    if terms.next().is_some() || !s.is_one() || !m.funcs().is_empty() || m.indep() != [0; 3] {
        return Err(syntax(0, format!("`{text}` is not a product of jets")));
    }
    Ok(m.jets().clone())
}

/// Parses a scalar expression over the parameters.
pub fn parse_scalar(text: &str) -> Result<ParamScalar> {
    let e = parse_expr(text)?;
    e.as_scalar()
        .ok_or_else(|| syntax(0, format!("`{text}` is not a parameter expression")))
}
