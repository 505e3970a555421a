//! Sparse univariate polynomials over F_q in a formal variable `u`.
//!
//! Exponents are `u128` because an element of the perfection at level `m`
//! is written in `u = θ^{1/q^m}` and θ itself is `u^{q^m}`.

use std::cmp::Ordering;

use crate::fq::FiniteField;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparsePoly {
    /// Strictly increasing exponents with nonzero coefficient codes.
    terms: Vec<(u128, u32)>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly { terms: Vec::new() }
    }

    pub fn constant(c: u32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            SparsePoly { terms: vec![(0, c)] }
        }
    }

    pub fn monomial(c: u32, exp: u128) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            SparsePoly { terms: vec![(exp, c)] }
        }
    }

    /// Builds from terms in any order, merging repeated exponents.
    pub fn from_terms(f: &FiniteField, mut terms: Vec<(u128, u32)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(u128, u32)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = f.add(last.1, c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        SparsePoly { terms: out }
    }

    pub fn terms(&self) -> &[(u128, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (0, 1)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn degree(&self) -> Option<u128> {
        self.terms.last().map(|t| t.0)
    }

    pub fn lowest_exponent(&self) -> Option<u128> {
        self.terms.first().map(|t| t.0)
    }

    pub fn leading_coeff(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.1)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, f: &FiniteField, other: &Self) -> Self {
        self.combine(f, other, false)
    }

    pub fn sub(&self, f: &FiniteField, other: &Self) -> Self {
        self.combine(f, other, true)
    }

    fn combine(&self, f: &FiniteField, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let b_coeff = |c: u32| if negate { f.neg(c) } else { c };
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = self.terms[i];
            let (eb, cb) = other.terms[j];
            match ea.cmp(&eb) {
                Ordering::Less => {
                    out.push((ea, ca));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((eb, b_coeff(cb)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(ca, b_coeff(cb));
                    if c != 0 {
                        out.push((ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend(other.terms[j..].iter().map(|&(e, c)| (e, b_coeff(c))));
        SparsePoly { terms: out }
    }

    pub fn neg(&self, f: &FiniteField) -> Self {
        SparsePoly { terms: self.terms.iter().map(|&(e, c)| (e, f.neg(c))).collect() }
    }

    pub fn scale(&self, f: &FiniteField, c: u32) -> Self {
        if c == 0 {
            return Self::zero();
        }
        if c == 1 {
            return self.clone();
        }
        SparsePoly { terms: self.terms.iter().map(|&(e, a)| (e, f.mul(a, c))).collect() }
    }

    /// Multiplies by `c·u^shift`.
    pub fn mul_term(&self, f: &FiniteField, c: u32, shift: u128) -> Self {
        if c == 0 {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|&(e, a)| (e + shift, f.mul(a, c))).collect() }
    }

    pub fn mul(&self, f: &FiniteField, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if other.terms.len() == 1 {
            let (e, c) = other.terms[0];
            return self.mul_term(f, c, e);
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms[0];
            return other.mul_term(f, c, e);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ea, ca) in &self.terms {
            for &(eb, cb) in &other.terms {
                prods.push((ea + eb, f.mul(ca, cb)));
            }
        }
        Self::from_terms(f, prods)
    }

    /// Replaces every exponent `e` by `e·k`.
    pub fn inflate(&self, k: u128) -> Self {
        SparsePoly { terms: self.terms.iter().map(|&(e, c)| (e * k, c)).collect() }
    }

    /// Replaces every exponent `e` by `e/k`; all exponents must be divisible by `k`.
    pub fn deflate(&self, k: u128) -> Self {
        debug_assert!(self.terms.iter().all(|t| t.0 % k == 0));
        SparsePoly { terms: self.terms.iter().map(|&(e, c)| (e / k, c)).collect() }
    }

    /// Divides by `u^k`; all exponents must be at least `k`.
    pub fn shift_down(&self, k: u128) -> Self {
        SparsePoly { terms: self.terms.iter().map(|&(e, c)| (e - k, c)).collect() }
    }

    /// Greatest common divisor of all exponents (0 for constants and zero).
    pub fn exponent_gcd(&self) -> u128 {
        self.terms.iter().fold(0u128, |g, t| gcd_u128(g, t.0))
    }

    /// Scales to leading coefficient one.
    pub fn monic(&self, f: &FiniteField) -> Self {
        match f.inv(self.leading_coeff()) {
            Some(inv) => self.scale(f, inv),
            None => Self::zero(),
        }
    }

    /// Long division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, f: &FiniteField, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let inv_lead = f.inv(divisor.leading_coeff()).expect("nonzero leading coefficient");
        if divisor.terms.len() == 1 {
            // monomial divisor: split terms
            let (mut quot, mut rem) = (Vec::new(), Vec::new());
            for &(e, c) in &self.terms {
                if e >= dd {
                    quot.push((e - dd, f.mul(c, inv_lead)));
                } else {
                    rem.push((e, c));
                }
            }
            return (SparsePoly { terms: quot }, SparsePoly { terms: rem });
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = f.mul(rem.leading_coeff(), inv_lead);
            let shift = rd - dd;
            quot.push((shift, c));
            let sub = divisor.mul_term(f, c, shift);
            rem = rem.sub(f, &sub);
        }
        quot.reverse();
        (SparsePoly { terms: quot }, rem)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, f: &FiniteField, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic(f);
        }
        if other.is_zero() {
            return self.monic(f);
        }
        // split off the power of u, then work in u^g when both are polynomials in u^g
        let la = self.lowest_exponent().unwrap();
        let lb = other.lowest_exponent().unwrap();
        let common_shift = la.min(lb);
        let a = self.shift_down(la);
        let b = other.shift_down(lb);
        let monomial = SparsePoly::monomial(1, common_shift);
        if a.terms.len() == 1 || b.terms.len() == 1 {
            return monomial;
        }
        let g = gcd_u128(a.exponent_gcd(), b.exponent_gcd());
        let (mut x, mut y) = if g > 1 { (a.deflate(g), b.deflate(g)) } else { (a, b) };
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let (_, r) = x.div_rem(f, &y);
            x = y;
            y = r;
        }
        let mut out = x.monic(f);
        if g > 1 {
            out = out.inflate(g);
        }
        out.mul(f, &monomial)
    }

    /// Exact division; panics in debug builds if the remainder is nonzero.
    pub fn exact_div(&self, f: &FiniteField, divisor: &Self) -> Self {
        if divisor.is_one() {
            return self.clone();
        }
        let (q, r) = self.div_rem(f, divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
