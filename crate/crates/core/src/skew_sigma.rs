//! The skew Laurent series field K((σ)) with `σ·α = α^{1/q}·σ`, and the finite
//! quotients K{σ}/(σ^s).
//!
//! A [`SkewLaurent`] is either exact (finite support, every coefficient
//! authoritative) or truncated at an absolute precision `N`: coefficients of
//! `σ^i` with `i < N` are known, everything from `N` on is unknown.

use std::collections::BTreeMap;
use std::fmt;

use crate::base_field::{PerfectField, PerfectFieldElement as Fe};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    Truncated(i64),
}

impl Precision {
    /// Absolute precision bound, `None` for exact values.
    pub fn bound(self) -> Option<i64> {
        match self {
            Precision::Exact => None,
            Precision::Truncated(n) => Some(n),
        }
    }

    pub fn min(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, p) | (p, Precision::Exact) => p,
            (Precision::Truncated(a), Precision::Truncated(b)) => Precision::Truncated(a.min(b)),
        }
    }
}

/// Three-valued answer for the σ-order of a possibly truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Known(i64),
    ZeroExact,
    /// All known coefficients vanish; the true order is at least the bound.
    Indistinguishable(i64),
}

impl Valuation {
    pub fn known(self) -> Option<i64> {
        match self {
            Valuation::Known(v) => Some(v),
            _ => None,
        }
    }

    /// Lower bound for the order; `None` is +∞.
    pub fn lower_bound(self) -> Option<i64> {
        match self {
            Valuation::Known(v) | Valuation::Indistinguishable(v) => Some(v),
            Valuation::ZeroExact => None,
        }
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SkewLaurent {
    field: PerfectField,
    terms: BTreeMap<i64, Fe>,
    precision: Precision,
}

impl SkewLaurent {
    pub fn zero(field: &PerfectField) -> Self {
        SkewLaurent { field: field.clone(), terms: BTreeMap::new(), precision: Precision::Exact }
    }

    pub fn one(field: &PerfectField) -> Self {
        Self::monomial(field.one(), 0)
    }

    pub fn scalar(c: Fe) -> Self {
        Self::monomial(c, 0)
    }

    /// `c·σ^k`.
    pub fn monomial(c: Fe, k: i64) -> Self {
        Self::exact(&c.field().clone(), [(k, c)])
    }

    pub fn sigma_pow(field: &PerfectField, k: i64) -> Self {
        Self::monomial(field.one(), k)
    }

    pub fn exact(field: &PerfectField, terms: impl IntoIterator<Item = (i64, Fe)>) -> Self {
        let mut out = Self::zero(field);
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn truncated(field: &PerfectField, terms: impl IntoIterator<Item = (i64, Fe)>, n: i64) -> Self {
        Self::exact(field, terms).truncate(n)
    }

    fn add_term(&mut self, k: i64, c: Fe) {
        if c.is_zero() {
            return;
        }
        if let Some(n) = self.precision.bound() {
            if k >= n {
                return;
            }
        }
        match self.terms.remove(&k) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn field(&self) -> &PerfectField {
        &self.field
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Exact
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Fe)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: i64) -> Fe {
        self.terms.get(&k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn valuation(&self) -> Valuation {
        match (self.terms.keys().next(), self.precision) {
            (Some(&v), _) => Valuation::Known(v),
            (None, Precision::Exact) => Valuation::ZeroExact,
            (None, Precision::Truncated(n)) => Valuation::Indistinguishable(n),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.valuation() == Valuation::ZeroExact
    }

    /// Zero as far as the known coefficients go (exact zero included).
    pub fn is_zero_to_precision(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_one(&self) -> bool {
        self.is_exact() && self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Exact single-term series `c·σ^k`.
    pub fn as_monomial(&self) -> Option<(i64, &Fe)> {
        (self.is_exact() && self.terms.len() == 1).then(|| self.terms().next().unwrap())
    }

    /// Leading (lowest-order) term.
    pub fn leading_term(&self) -> Option<(i64, &Fe)> {
        self.terms().next()
    }

    /// Forgets every coefficient of order ≥ `n`.
    pub fn truncate(&self, n: i64) -> Self {
        let precision = self.precision.min(Precision::Truncated(n));
        let terms = self.terms.range(..n).map(|(&k, c)| (k, c.clone())).collect();
        SkewLaurent { field: self.field.clone(), terms, precision }
    }

    /// Replaces the precision with a weaker one (never strengthens a truncated value).
    pub fn with_precision(&self, p: Precision) -> Self {
        match p {
            Precision::Exact => self.clone(),
            Precision::Truncated(n) => self.truncate(n),
        }
    }

    /// The known terms, reinterpreted as an exact value.
    pub fn forget_precision(&self) -> Self {
        SkewLaurent { field: self.field.clone(), terms: self.terms.clone(), precision: Precision::Exact }
    }

    pub fn add(&self, other: &Self) -> Self {
        let precision = self.precision.min(other.precision);
        let mut out = SkewLaurent { field: self.field.clone(), terms: BTreeMap::new(), precision };
        let bound = precision.bound();
        let keep = |k: i64| bound.is_none_or(|n| k < n);
        out.terms = self.terms.iter().filter(|(&k, _)| keep(k)).map(|(&k, c)| (k, c.clone())).collect();
        for (k, c) in other.terms() {
            if keep(k) {
                out.add_term(k, c.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        SkewLaurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
            precision: self.precision,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Twisted convolution `∑ a_i·b_j^{(−i)} σ^{i+j}`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.field);
        }
        let la = self.valuation().lower_bound();
        let lb = other.valuation().lower_bound();
        let bound = min_opt(add_opt(self.precision.bound(), lb), add_opt(other.precision.bound(), la));
        let precision = bound.map_or(Precision::Exact, Precision::Truncated);
        let mut acc: BTreeMap<i64, Fe> = BTreeMap::new();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                let k = i + j;
                if bound.is_some_and(|n| k >= n) {
                    break;
                }
                let prod = a * &b.twist(-i);
                match acc.remove(&k) {
                    Some(old) => {
                        let s = &old + &prod;
                        if !s.is_zero() {
                            acc.insert(k, s);
                        }
                    }
                    None => {
                        acc.insert(k, prod);
                    }
                }
            }
        }
        SkewLaurent { field: self.field.clone(), terms: acc, precision }
    }

    /// `σ^k · x`.
    pub fn shift_left(&self, k: i64) -> Self {
        SkewLaurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&i, c)| (i + k, c.twist(-k))).collect(),
            precision: match self.precision {
                Precision::Exact => Precision::Exact,
                Precision::Truncated(n) => Precision::Truncated(n + k),
            },
        }
    }

    /// `x · σ^k`.
    pub fn shift_right(&self, k: i64) -> Self {
        SkewLaurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&i, c)| (i + k, c.clone())).collect(),
            precision: match self.precision {
                Precision::Exact => Precision::Exact,
                Precision::Truncated(n) => Precision::Truncated(n + k),
            },
        }
    }

    /// `c · x`.
    pub fn scale_left(&self, c: &Fe) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        SkewLaurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&i, a)| (i, c * a)).collect(),
            precision: self.precision,
        }
    }

    /// Coefficient-wise Frobenius twist `x^{(k)}`.
    pub fn twist(&self, k: i64) -> Self {
        SkewLaurent {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&i, a)| (i, a.twist(k))).collect(),
            precision: self.precision,
        }
    }

    /// Two-sided inverse, known up to absolute precision `target` (or exactly
    /// for monomials). Uses the Newton iteration `y ← y + y·(1 − x·y)`.
    pub fn invert(&self, target: i64) -> Result<Self> {
        let v = match self.valuation() {
            Valuation::Known(v) => v,
            Valuation::ZeroExact => return Err(Error::DivisionByZero),
            Valuation::Indistinguishable(n) => return Err(Error::AmbiguousZero { precision: n }),
        };
        let lead = self.terms[&v].clone();
        // (a σ^v)^{-1} = (a^{-1})^{(v)} σ^{-v}
        let lead_inv = Self::monomial(lead.inv()?.twist(v), -v);
        if self.is_exact() && self.terms.len() == 1 {
            return Ok(lead_inv);
        }
        let available = self.precision.bound().map(|n| n - v);
        let wanted = target + v;
        let rel = available.map_or(wanted, |a| a.min(wanted));
        if rel <= 0 {
            return Ok(Self::zero(&self.field).truncate(-v + rel));
        }
        let one = Self::one(&self.field);
        let mut y = lead_inv;
        let mut m = 1i64;
        while m < rel {
            let m2 = (2 * m).min(rel);
            // the current approximant is used as an exact value
            let ye = y.forget_precision();
            let xt = self.truncate(v + m2);
            let err = one.sub(&xt.mul(&ye)).truncate(m2);
            y = ye.add(&ye.mul(&err)).truncate(-v + m2);
            m = m2;
        }
        Ok(y.truncate(-v + rel))
    }
}

impl fmt::Display for SkewLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::render_laurent(self))
    }
}

impl fmt::Debug for SkewLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An element of K{σ}/(σ^s), stored densely.
#[derive(Clone, PartialEq, Eq)]
pub struct QuotientRingElement {
    field: PerfectField,
    coeffs: Vec<Fe>,
}

impl QuotientRingElement {
    pub fn zero(field: &PerfectField, s: usize) -> Self {
        QuotientRingElement { field: field.clone(), coeffs: vec![field.zero(); s] }
    }

    pub fn one(field: &PerfectField, s: usize) -> Self {
        let mut out = Self::zero(field, s);
        if s > 0 {
            out.coeffs[0] = field.one();
        }
        out
    }

    /// Coefficients of `σ^0, …, σ^{s−1}`; longer input is cut, shorter is padded.
    pub fn from_coeffs(field: &PerfectField, s: usize, coeffs: impl IntoIterator<Item = Fe>) -> Self {
        let mut out = Self::zero(field, s);
        for (i, c) in coeffs.into_iter().take(s).enumerate() {
            out.coeffs[i] = c;
        }
        out
    }

    /// Reduction of a series with non-negative order modulo `σ^s`.
    pub fn from_laurent(x: &SkewLaurent, s: usize) -> Result<Self> {
        if let Some(n) = x.precision().bound() {
            if n < s as i64 {
                return Err(Error::AmbiguousZero { precision: n });
            }
        }
        if let Some(v) = x.valuation().known() {
            if v < 0 {
                return Err(Error::FieldMismatch(format!("series of order {v} is not in the valuation ring")));
            }
        }
        let mut out = Self::zero(x.field(), s);
        for (k, c) in x.terms() {
            if (k as usize) < s {
                out.coeffs[k as usize] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn to_laurent(&self) -> SkewLaurent {
        SkewLaurent::exact(&self.field, self.coeffs.iter().enumerate().map(|(i, c)| (i as i64, c.clone())))
    }

    pub fn modulus_exponent(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.first().is_some_and(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        QuotientRingElement { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        QuotientRingElement { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        QuotientRingElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let s = self.coeffs.len();
        let mut out = Self::zero(&self.field, s);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(s - i) {
                if b.is_zero() {
                    continue;
                }
                let prod = a * &b.twist(-(i as i64));
                out.coeffs[i + j] = &out.coeffs[i + j] + &prod;
            }
        }
        out
    }

    /// Two-sided inverse, lifted one coefficient at a time.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let s = self.coeffs.len();
        let c0_inv = self.coeffs[0].inv()?;
        let mut y: Vec<Fe> = Vec::with_capacity(s);
        for k in 0..s {
            // x_0·y_k + ∑_{i≥1} x_i·y_{k−i}^{(−i)} = δ_{k0}
            let mut rhs = if k == 0 { self.field.one() } else { self.field.zero() };
            for i in 1..=k {
                let xi = &self.coeffs[i];
                if !xi.is_zero() && !y[k - i].is_zero() {
                    rhs = &rhs - &(xi * &y[k - i].twist(-(i as i64)));
                }
            }
            y.push(&c0_inv * &rhs);
        }
        Ok(QuotientRingElement { field: self.field.clone(), coeffs: y })
    }

    /// For `x` of valuation ≥ `nu`, the `u` with `x = u·σ^nu`, taken mod `σ^{s−nu}`.
    pub fn strip_right(&self, nu: usize) -> Self {
        let coeffs = self.coeffs[nu..].to_vec();
        QuotientRingElement { field: self.field.clone(), coeffs }
    }

    /// For `x` of valuation ≥ `nu`, the `u` with `x = σ^nu·u`, taken mod `σ^{s−nu}`.
    pub fn strip_left(&self, nu: usize) -> Self {
        let coeffs = self.coeffs[nu..].iter().map(|c| c.twist(nu as i64)).collect();
        QuotientRingElement { field: self.field.clone(), coeffs }
    }

    /// Reinterprets modulo a different power of σ (cutting or zero-padding).
    pub fn resize(&self, s: usize) -> Self {
        Self::from_coeffs(&self.field, s, self.coeffs.iter().cloned())
    }
}

impl fmt::Debug for QuotientRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod s^{}", self.to_laurent(), self.coeffs.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> PerfectField {
        PerfectField::rational(q).unwrap()
    }

    #[test]
    fn sigma_times_theta() {
        let f = k(3);
        let th = f.theta().unwrap();
        let prod = SkewLaurent::sigma_pow(&f, 1).mul(&SkewLaurent::scalar(th.clone()));
        assert_eq!(prod, SkewLaurent::monomial(th.twist(-1), 1));
    }

    #[test]
    fn sigma_inverse_is_exact() {
        let f = k(3);
        let p = SkewLaurent::sigma_pow(&f, -1).mul(&SkewLaurent::sigma_pow(&f, 1));
        assert!(p.is_exact_one());
        let inv = SkewLaurent::sigma_pow(&f, 2).invert(10).unwrap();
        assert_eq!(inv, SkewLaurent::sigma_pow(&f, -2));
    }

    #[test]
    fn geometric_series_truncation() {
        let f = k(3);
        let one_plus = SkewLaurent::exact(&f, [(0, f.one()), (1, f.one())]);
        let alt = SkewLaurent::truncated(&f, (0..4).map(|i| (i, f.from_int(if i % 2 == 0 { 1 } else { -1 }))), 4);
        let prod = one_plus.mul(&alt);
        assert_eq!(prod, SkewLaurent::one(&f).truncate(4));
        assert_eq!(prod.precision(), Precision::Truncated(4));
    }

    #[test]
    fn invert_one_plus_sigma() {
        let f = k(3);
        let x = SkewLaurent::exact(&f, [(0, f.one()), (1, f.one())]);
        let y = x.invert(3).unwrap();
        let expected = SkewLaurent::truncated(&f, [(0, f.one()), (1, f.from_int(-1)), (2, f.one())], 3);
        assert_eq!(y, expected);
    }

    #[test]
    fn invert_theta_plus_sigma() {
        // oracle: x·y and y·x agree with 1 below σ^2; the σ-coefficient is −(θ^{-1})^{1+1/q}
        let f = k(3);
        let th = f.theta().unwrap();
        let x = SkewLaurent::exact(&f, [(0, th.clone()), (1, f.one())]);
        let y = x.invert(2).unwrap();
        let ti = th.inv().unwrap();
        let expected = SkewLaurent::truncated(&f, [(0, ti.clone()), (1, -(&ti * &ti.twist(-1)))], 2);
        assert_eq!(y, expected);
        assert_eq!(x.mul(&y), SkewLaurent::one(&f).truncate(2));
        assert_eq!(y.mul(&x), SkewLaurent::one(&f).truncate(2));
    }

    #[test]
    fn ambiguous_inverse() {
        let f = k(3);
        let z = SkewLaurent::zero(&f).truncate(5);
        assert_eq!(z.valuation(), Valuation::Indistinguishable(5));
        assert_eq!(z.invert(10), Err(Error::AmbiguousZero { precision: 5 }));
        assert_eq!(SkewLaurent::zero(&f).invert(3), Err(Error::DivisionByZero));
    }

    #[test]
    fn twist_commutes_past_sigma_powers() {
        let f = k(2);
        let th = f.theta().unwrap();
        let x = SkewLaurent::exact(&f, [(-1, th.clone()), (2, &th * &th)]);
        for k in -2..=3 {
            let lhs = SkewLaurent::sigma_pow(&f, k).mul(&x);
            let rhs = x.twist(-k).mul(&SkewLaurent::sigma_pow(&f, k));
            assert_eq!(lhs, rhs);
        }
        let t = SkewLaurent::monomial(th.clone(), 1).twist(1);
        assert_eq!(t, SkewLaurent::monomial(th.pow(2).unwrap(), 1));
    }

    #[test]
    fn quotient_ring_examples() {
        let f = k(3);
        let x = QuotientRingElement::from_coeffs(&f, 3, [f.one(), f.one()]);
        assert_eq!(x.invert().unwrap(), QuotientRingElement::from_coeffs(&f, 3, [f.one(), f.from_int(-1), f.one()]));
        let s = 4;
        let sig = QuotientRingElement::from_coeffs(&f, s, [f.zero(), f.one()]);
        let sig_top = QuotientRingElement::from_coeffs(&f, s, [f.zero(), f.zero(), f.zero(), f.one()]);
        assert!(sig.mul(&sig_top).is_zero());
        assert_eq!(sig.invert(), Err(Error::NotAUnit));

        let th = f.theta().unwrap();
        let y = QuotientRingElement::from_coeffs(&f, 2, [th.clone(), th.clone()]);
        let inv = y.invert().unwrap();
        assert_eq!(y.mul(&inv), QuotientRingElement::one(&f, 2));
        assert_eq!(inv.mul(&y), QuotientRingElement::one(&f, 2));
    }
}
