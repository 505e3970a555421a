//! Text syntax for elements of K and for skew polynomials and series over K.
//!
//! ```text
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ("^" ["-"] int)?
//! atom   := "tau" | "th" | "z" | "s" | "root" "(" expr "," int ")" | int | "(" expr ")"
//! ```
//!
//! `th` is θ, `root(E,m)` is `E^{1/q^m}`, `z` is the generator of F_q over
//! F_p, `tau` is τ and `s` is σ = τ^{-1}. Integer literals are reduced mod p.
//! Products follow the commutation rules `τ·c = c^q·τ` and `σ·c = c^{1/q}·σ`.
//! Division and negative exponents are allowed when the divisor (or base) is
//! a single exact term. A Laurent series may end in `+ O(s^N)`.
//!
//! Rendering produces text that parses back to the identical value.

use std::fmt;

use crate::base_field::{PerfectField, PerfectFieldElement as Fe};
use crate::skew_sigma::{Precision, SkewLaurent};
use crate::skew_tau::SkewTauPoly;

/// Parse failure with the byte offset into the expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at offset {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Scalar,
    Tau,
    Laurent,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u128),
    Sym(char),
    End,
}

/// Exponents above this size are only accepted for single-term bases.
const MAX_GENERAL_EXPONENT: u64 = 4096;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    field: &'a PerfectField,
    mode: Mode,
}

type PResult<T> = std::result::Result<T, ExprError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str, field: &'a PerfectField, mode: Mode) -> Self {
        Parser { src, pos: 0, field, mode }
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> PResult<T> {
        Err(ExprError { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and the offset just after it, without consuming.
    fn peek(&mut self) -> PResult<(Tok, usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start, start));
        };
        if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let value = rest[..len].parse::<u128>().or_else(|_| self.err(start, "integer literal too large"))?;
            return Ok((Tok::Int(value), start, start + len));
        }
        if c.is_alphabetic() || c == '_' {
            let len = rest.find(|ch: char| !(ch.is_alphanumeric() || ch == '_')).unwrap_or(rest.len());
            let word = match &rest[..len] {
                "θ" | "theta" => "th",
                "τ" => "tau",
                "σ" | "sigma" => "s",
                w => w,
            };
            return Ok((Tok::Ident(word.to_string()), start, start + len));
        }
        if "+-*/^(),".contains(c) {
            return Ok((Tok::Sym(c), start, start + 1));
        }
        self.err(start, format!("unexpected character '{c}'"))
    }

    fn next(&mut self) -> PResult<(Tok, usize)> {
        let (tok, start, end) = self.peek()?;
        self.pos = end;
        Ok((tok, start))
    }

    fn peek_sym(&mut self, c: char) -> PResult<bool> {
        Ok(self.peek()?.0 == Tok::Sym(c))
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        let (tok, at) = self.next()?;
        if tok != Tok::Sym(c) {
            return self.err(at, format!("expected '{c}'"));
        }
        Ok(())
    }

    fn expect_int(&mut self) -> PResult<(u128, usize)> {
        let (tok, at) = self.next()?;
        match tok {
            Tok::Int(v) => Ok((v, at)),
            _ => self.err(at, "expected an integer"),
        }
    }

    fn signed_int(&mut self) -> PResult<(i64, usize)> {
        let negative = self.peek_sym('-')?;
        if negative {
            self.next()?;
        }
        let parenthesized = !negative && self.peek_sym('(')?;
        let (neg_inner, value, at) = if parenthesized {
            self.next()?;
            let neg_inner = self.peek_sym('-')?;
            if neg_inner {
                self.next()?;
            }
            let (v, at) = self.expect_int()?;
            self.expect_sym(')')?;
            (neg_inner, v, at)
        } else {
            let (v, at) = self.expect_int()?;
            (false, v, at)
        };
        let value = i64::try_from(value).or_else(|_| self.err(at, "exponent too large"))?;
        Ok((if negative || neg_inner { -value } else { value }, at))
    }

    /// Whole input; returns the value and an optional `O(s^N)` bound.
    fn parse_top(&mut self) -> PResult<(SkewLaurent, Option<i64>)> {
        let (value, tail) = self.parse_sum(true)?;
        let (tok, at) = self.next()?;
        if tok != Tok::End {
            return self.err(at, "unexpected trailing input");
        }
        Ok((value, tail))
    }

    fn parse_sum(&mut self, top: bool) -> PResult<(SkewLaurent, Option<i64>)> {
        let mut acc = SkewLaurent::zero(self.field);
        let mut tail = None;
        let mut first = true;
        loop {
            let mut negative = false;
            let (tok, at, _) = self.peek()?;
            match tok {
                Tok::Sym('+') | Tok::Sym('-') => {
                    negative = tok == Tok::Sym('-');
                    self.next()?;
                }
                _ if !first => break,
                _ => {}
            }
            first = false;
            if let (Tok::Ident(w), o_at, _) = self.peek()? {
                if w == "O" {
                    if !top || self.mode != Mode::Laurent {
                        return self.err(o_at, "O(...) is only allowed as the last term of a Laurent series");
                    }
                    if negative {
                        return self.err(at, "O(...) must be added, not subtracted");
                    }
                    tail = Some(self.parse_big_o()?);
                    let (next, next_at, _) = self.peek()?;
                    if next != Tok::End {
                        return self.err(next_at, "O(...) must be the last term");
                    }
                    break;
                }
            }
            let term = self.parse_term()?;
            acc = if negative { acc.sub(&term) } else { acc.add(&term) };
        }
        Ok((acc, tail))
    }

    fn parse_big_o(&mut self) -> PResult<i64> {
        self.next()?;
        self.expect_sym('(')?;
        let (tok, at) = self.next()?;
        if tok != Tok::Ident("s".into()) {
            return self.err(at, "expected s inside O(...)");
        }
        let n = if self.peek_sym('^')? {
            self.next()?;
            self.signed_int()?.0
        } else {
            1
        };
        self.expect_sym(')')?;
        Ok(n)
    }

    fn parse_term(&mut self) -> PResult<SkewLaurent> {
        let mut acc = self.parse_factor()?;
        loop {
            if self.peek_sym('*')? {
                self.next()?;
                let rhs = self.parse_factor()?;
                acc = acc.mul(&rhs);
            } else if self.peek_sym('/')? {
                let (_, at) = self.next()?;
                let rhs = self.parse_factor()?;
                let inv = self.exact_inverse(&rhs, at)?;
                acc = acc.mul(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn exact_inverse(&self, x: &SkewLaurent, at: usize) -> PResult<SkewLaurent> {
        if x.is_exact_zero() {
            return self.err(at, "division by zero");
        }
        if x.as_monomial().is_none() {
            return self.err(at, "only single-term values can be inverted exactly");
        }
        x.invert(0).or_else(|e| self.err(at, e.to_string()))
    }

    fn parse_factor(&mut self) -> PResult<SkewLaurent> {
        let base = self.parse_atom()?;
        if !self.peek_sym('^')? {
            return Ok(base);
        }
        self.next()?;
        let (n, at) = self.signed_int()?;
        let single = base.as_monomial().is_some();
        if n.unsigned_abs() > MAX_GENERAL_EXPONENT && !single {
            return self.err(at, format!("exponent {n} is too large for a multi-term base"));
        }
        if n < 0 {
            let inv = self.exact_inverse(&base, at)?;
            return Ok(power(&inv, n.unsigned_abs()));
        }
        if let (true, Some((0, c))) = (single, base.as_monomial()) {
            let p = c.pow(n).or_else(|e| self.err(at, e.to_string()))?;
            return Ok(SkewLaurent::scalar(p));
        }
        Ok(power(&base, n as u64))
    }

    fn parse_atom(&mut self) -> PResult<SkewLaurent> {
        let (tok, at) = self.next()?;
        match tok {
            Tok::Int(v) => {
                let p = self.field.p() as u128;
                Ok(SkewLaurent::scalar(self.field.from_int((v % p) as i64)))
            }
            Tok::Sym('(') => {
                let (value, _) = self.parse_sum(false)?;
                self.expect_sym(')')?;
                Ok(value)
            }
            Tok::Ident(w) => match w.as_str() {
                "th" => match self.field.theta() {
                    Ok(th) => Ok(SkewLaurent::scalar(th)),
                    Err(_) => self.err(at, "th is not available when K is a finite field"),
                },
                "z" => Ok(SkewLaurent::scalar(self.field.generator())),
                "tau" => match self.mode {
                    Mode::Scalar => self.err(at, "tau is not allowed in a field element"),
                    _ => Ok(SkewLaurent::sigma_pow(self.field, -1)),
                },
                "s" => match self.mode {
                    Mode::Laurent => Ok(SkewLaurent::sigma_pow(self.field, 1)),
                    _ => self.err(at, "s is only allowed in Laurent series"),
                },
                "root" => {
                    self.expect_sym('(')?;
                    let inner_at = self.peek()?.1;
                    let (inner, _) = self.parse_sum(false)?;
                    self.expect_sym(',')?;
                    let (m, m_at) = self.expect_int()?;
                    self.expect_sym(')')?;
                    let m = i64::try_from(m).or_else(|_| self.err(m_at, "root depth too large"))?;
                    let c = match (inner.is_exact_zero(), inner.as_monomial()) {
                        (true, _) => self.field.zero(),
                        (false, Some((0, c))) => c.clone(),
                        _ => return self.err(inner_at, "the argument of root(...) must not contain tau or s"),
                    };
                    Ok(SkewLaurent::scalar(c.twist(-m)))
                }
                other => self.err(at, format!("unknown identifier '{other}'")),
            },
            Tok::End => self.err(at, "unexpected end of input"),
            Tok::Sym(c) => self.err(at, format!("unexpected '{c}'")),
        }
    }
}

fn power(base: &SkewLaurent, n: u64) -> SkewLaurent {
    let mut acc = SkewLaurent::one(base.field());
    let mut b = base.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        e >>= 1;
        if e > 0 {
            b = b.mul(&b);
        }
    }
    acc
}

/// Parses an element of K.
pub fn parse_element(field: &PerfectField, src: &str) -> Result<Fe, ExprError> {
    let mut p = Parser::new(src, field, Mode::Scalar);
    let (value, _) = p.parse_top()?;
    if value.is_exact_zero() {
        return Ok(field.zero());
    }
    Ok(value.coeff(0))
}

/// Parses a skew polynomial in τ.
pub fn parse_tau(field: &PerfectField, src: &str) -> Result<SkewTauPoly, ExprError> {
    let mut p = Parser::new(src, field, Mode::Tau);
    let (value, _) = p.parse_top()?;
    if let Some((k, _)) = value.terms().next_back() {
        if k > 0 {
            return Err(ExprError { offset: 0, message: "expression is not a polynomial in tau".into() });
        }
    }
    Ok(SkewTauPoly::from_coeffs(field, value.terms().map(|(k, c)| ((-k) as usize, c.clone()))))
}

/// Parses a skew Laurent series in σ, with an optional `+ O(s^N)` tail.
pub fn parse_laurent(field: &PerfectField, src: &str) -> Result<SkewLaurent, ExprError> {
    let mut p = Parser::new(src, field, Mode::Laurent);
    let (value, tail) = p.parse_top()?;
    Ok(match tail {
        Some(n) => value.truncate(n),
        None => value,
    })
}

fn render_fq(field: &PerfectField, code: u32) -> String {
    let fq = field.fq();
    if fq.e() == 1 {
        return code.to_string();
    }
    let parts: Vec<String> = fq
        .digits(code)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0)
        .map(|(i, &d)| match (i, d) {
            (0, d) => d.to_string(),
            (1, 1) => "z".to_string(),
            (1, d) => format!("{d}*z"),
            (i, 1) => format!("z^{i}"),
            (i, d) => format!("{d}*z^{i}"),
        })
        .collect();
    match parts.len() {
        0 => "0".to_string(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("({})", parts.join(" + ")),
    }
}

/// `θ^(e/q^level)` in lowest terms, or `None` for exponent 0.
fn render_theta_power(q: u128, mut e: u128, mut level: u32) -> Option<String> {
    if e == 0 {
        return None;
    }
    while level > 0 && e.is_multiple_of(q) {
        e /= q;
        level -= 1;
    }
    let base = if e == 1 { "th".to_string() } else { format!("th^{e}") };
    Some(if level == 0 { base } else { format!("root({base},{level})") })
}

fn render_poly(field: &PerfectField, poly: &crate::poly::SparsePoly, level: u32) -> (String, usize) {
    let q = field.q() as u128;
    let terms: Vec<String> = poly
        .terms()
        .iter()
        .map(|&(e, c)| {
            let coeff = render_fq(field, c);
            match render_theta_power(q, e, level) {
                None => coeff,
                Some(m) if c == 1 => m,
                Some(m) => format!("{coeff}*{m}"),
            }
        })
        .collect();
    if terms.is_empty() {
        return ("0".to_string(), 0);
    }
    let n = terms.len();
    (terms.join(" + "), n)
}

/// Canonical text of an element of K.
pub fn render_element(x: &Fe) -> String {
    let field = x.field();
    let (num, n_terms) = render_poly(field, x.numerator(), x.level());
    if x.denominator().is_one() {
        return num;
    }
    let (den, d_terms) = render_poly(field, x.denominator(), x.level());
    let num = if n_terms > 1 { format!("({num})") } else { num };
    let den = if d_terms > 1 || den.contains('*') { format!("({den})") } else { den };
    format!("{num}/{den}")
}

/// Renders a coefficient so that it can be followed by `*`.
fn coefficient_factor(c: &Fe) -> String {
    let s = render_element(c);
    if s.contains(' ') || s.contains('/') {
        format!("({s})")
    } else {
        s
    }
}

fn render_term(c: &Fe, var: Option<String>) -> String {
    match var {
        None => render_element(c),
        Some(v) if c.is_one() => v,
        Some(v) => format!("{}*{v}", coefficient_factor(c)),
    }
}

/// Canonical text `c0 + c1*tau + c2*tau^2 + …` of a skew polynomial.
pub fn render_tau(p: &SkewTauPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let parts: Vec<String> = p
        .terms()
        .map(|(k, c)| {
            let var = match k {
                0 => None,
                1 => Some("tau".to_string()),
                k => Some(format!("tau^{k}")),
            };
            render_term(c, var)
        })
        .collect();
    parts.join(" + ")
}

/// Canonical text `… + c*s^k + … + O(s^N)` of a skew Laurent series.
pub fn render_laurent(x: &SkewLaurent) -> String {
    let mut parts: Vec<String> = x
        .terms()
        .map(|(k, c)| {
            let var = match k {
                0 => None,
                1 => Some("s".to_string()),
                k => Some(format!("s^{k}")),
            };
            render_term(c, var)
        })
        .collect();
    if let Precision::Truncated(n) = x.precision() {
        parts.push(format!("O(s^{n})"));
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    parts.join(" + ")
}

/// Thin wrapper so callers can `format!` an element with its canonical text.
pub struct Rendered<'a>(pub &'a Fe);

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_element(self.0))
    }
}
