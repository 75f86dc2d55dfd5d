//! Text form of polynomials.
//!
//! Input accepts sums of products of integer or `int/uint` literals,
//! variables, powers and parenthesized subexpressions; `*` may be omitted
//! between factors. `#` starts a comment running to the end of the line.
//! Output is the canonical form: graded-lex descending, single spaces around
//! `+` and `-`, no `1*` factors and `0` for the zero polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::Field;

use super::{Ctx, Monomial, PolyContext, PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(PolyError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ctx: &'a Ctx,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() != &Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(e) => match u32::try_from(&e) {
                Ok(e) => Ok(base.pow(e)),
                Err(_) => Err(PolyError::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                }),
            },
            _ => Err(PolyError::Syntax {
                pos,
                msg: "expected a non-negative integer exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => {
                let mut value = BigRational::from_integer(n);
                if self.peek() == &Tok::Slash {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Tok::Num(d) if !d.is_zero() => {
                            value /= BigRational::from_integer(d);
                        }
                        Tok::Num(_) => {
                            return Err(PolyError::Syntax {
                                pos: dpos,
                                msg: "zero denominator".into(),
                            })
                        }
                        _ => {
                            return Err(PolyError::Syntax {
                                pos: dpos,
                                msg: "expected an integer denominator".into(),
                            })
                        }
                    }
                }
                Polynomial::constant(self.ctx, &value).map_err(|_| PolyError::Syntax {
                    pos,
                    msg: format!("denominator is zero in {}", self.ctx.field()),
                })
            }
            Tok::Ident(name) => match self.ctx.index_of(&name) {
                Some(i) => Ok(Polynomial::var_index(self.ctx, i)),
                None => Err(PolyError::UnknownVariable(name)),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != &Tok::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(PolyError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            t => Err(PolyError::Syntax {
                pos,
                msg: format!("unexpected {}", describe(&t)),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/` (only literal fractions are allowed)",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

/// Parses `text` into a canonical polynomial of `ctx`.
pub fn parse(text: &str, ctx: &Ctx) -> Result<Polynomial, PolyError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, ctx };
    if p.peek() == &Tok::End {
        return p.error("empty polynomial");
    }
    let out = p.expr()?;
    if p.peek() != &Tok::End {
        let t = p.peek().clone();
        return p.error(format!("unexpected {}", describe(&t)));
    }
    Ok(out)
}

/// Identifiers occurring in `text`, in order of first appearance.
pub fn tokenize_identifiers(text: &str) -> Result<Vec<String>, PolyError> {
    let mut seen = Vec::new();
    for (t, _) in tokenize(text)? {
        if let Tok::Ident(name) = t {
            if !seen.contains(&name) {
                seen.push(name);
            }
        }
    }
    Ok(seen)
}

fn natural_key(name: &str) -> (String, u64, String) {
    let digits = name.len() - name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (stem, num) = name.split_at(name.len() - digits);
    (stem.to_string(), num.parse().unwrap_or(0), name.to_string())
}

/// Parses text whose variables are not known in advance. Variables are
/// ordered by name stem then index (`x0, x1, ..., y1, ...`); names listed in
/// `unit_params` that occur become unit parameters placed last.
pub fn parse_with_inferred_context(
    text: &str,
    field: Field,
    unit_params: &[&str],
) -> Result<Polynomial, PolyError> {
    let mut vars: Vec<String> = Vec::new();
    let mut params: Vec<String> = Vec::new();
    for name in tokenize_identifiers(text)? {
        if unit_params.contains(&name.as_str()) {
            params.push(name);
        } else {
            vars.push(name);
        }
    }
    vars.sort_by_key(|v| natural_key(v));
    params.sort_by_key(|v| natural_key(v));
    let ctx = PolyContext::with_params(field, &vars, &params)?;
    parse(text, &ctx)
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn write_monomial(
    f: &mut impl fmt::Write,
    ctx: &PolyContext,
    m: &Monomial,
) -> fmt::Result {
    let mut first = true;
    for (i, e) in m.iter() {
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(ctx.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text of a monomial in `ctx`.
pub fn monomial_to_string(ctx: &PolyContext, m: &Monomial) -> String {
    if m.is_one() {
        return "1".into();
    }
    let mut s = String::new();
    write_monomial(&mut s, ctx, m).expect("writing to a string");
    s
}

pub(super) fn write_polynomial(f: &mut fmt::Formatter<'_>, p: &Polynomial) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    let ctx = p.ctx();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        if m.is_one() {
            write_coeff(f, &a)?;
        } else {
            if !a.is_one() {
                write_coeff(f, &a)?;
                f.write_str("*")?;
            }
            write_monomial(f, ctx, m)?;
        }
    }
    Ok(())
}
