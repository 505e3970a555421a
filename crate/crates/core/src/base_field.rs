//! Exact arithmetic in the perfect field K.
//!
//! Two shapes of K are supported: the finite field F_q itself, and the
//! perfection of the rational function field, `⋃_m F_q(θ^{1/q^m})`. An element
//! of the latter is stored at a *level* `m` as a reduced fraction of
//! polynomials in `u = θ^{1/q^m}`; the level is always the smallest one the
//! element lives in, so equality is structural.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::{split_prime_power, FiniteField};
use crate::poly::{gcd_u128, SparsePoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    /// K = F_q.
    FiniteField,
    /// K = perfection of F_q(θ).
    RationalPerfection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    pub mode: FieldMode,
}

impl FieldConfig {
    pub fn new(q: u64, mode: FieldMode) -> Result<Self> {
        let (p, e) =
            split_prime_power(q).ok_or_else(|| Error::InvalidConfig(format!("q = {q} is not a prime power")))?;
        Ok(FieldConfig { p, e, q: q as u32, mode })
    }

    pub fn rational(q: u64) -> Result<Self> {
        Self::new(q, FieldMode::RationalPerfection)
    }
}

#[derive(Debug)]
struct FieldInner {
    config: FieldConfig,
    fq: FiniteField,
}

/// Handle to a concrete perfect field; cheap to clone and shared by all of
/// its elements.
#[derive(Debug, Clone)]
pub struct PerfectField(Arc<FieldInner>);

impl PartialEq for PerfectField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.config == other.0.config
    }
}

impl Eq for PerfectField {}

impl PerfectField {
    pub fn new(config: FieldConfig) -> Result<Self> {
        let fq = FiniteField::new(config.p, config.e)?;
        if fq.q() != config.q {
            return Err(Error::InvalidConfig(format!(
                "q = {} does not equal p^e = {}^{}",
                config.q, config.p, config.e
            )));
        }
        Ok(PerfectField(Arc::new(FieldInner { config, fq })))
    }

    /// The perfection of F_q(θ).
    pub fn rational(q: u64) -> Result<Self> {
        Self::new(FieldConfig::rational(q)?)
    }

    pub fn config(&self) -> &FieldConfig {
        &self.0.config
    }

    pub fn fq(&self) -> &FiniteField {
        &self.0.fq
    }

    pub fn q(&self) -> u32 {
        self.0.config.q
    }

    pub fn p(&self) -> u32 {
        self.0.config.p
    }

    pub fn has_theta(&self) -> bool {
        self.0.config.mode == FieldMode::RationalPerfection
    }

    pub fn zero(&self) -> PerfectFieldElement {
        PerfectFieldElement::raw(self.clone(), 0, SparsePoly::zero(), SparsePoly::constant(1))
    }

    pub fn one(&self) -> PerfectFieldElement {
        self.from_fq(1)
    }

    pub fn from_int(&self, n: i64) -> PerfectFieldElement {
        self.from_fq(self.fq().from_int(n))
    }

    /// Embeds the F_q element with the given code.
    pub fn from_fq(&self, code: u32) -> PerfectFieldElement {
        PerfectFieldElement::raw(self.clone(), 0, SparsePoly::constant(code), SparsePoly::constant(1))
    }

    /// The generator `z` of F_q over F_p.
    pub fn generator(&self) -> PerfectFieldElement {
        self.from_fq(self.fq().generator())
    }

    /// θ; fails when K = F_q.
    pub fn theta(&self) -> Result<PerfectFieldElement> {
        if !self.has_theta() {
            return Err(Error::FieldMismatch("θ is not available when K = F_q".into()));
        }
        Ok(PerfectFieldElement::raw(self.clone(), 0, SparsePoly::monomial(1, 1), SparsePoly::constant(1)))
    }

    /// `c·θ^(num/q^level)`, already reduced to canonical form.
    pub fn theta_power(&self, c: u32, exp_num: u128, level: u32) -> Result<PerfectFieldElement> {
        if exp_num > 0 && !self.has_theta() {
            return Err(Error::FieldMismatch("θ is not available when K = F_q".into()));
        }
        Ok(PerfectFieldElement::normalize(
            self.clone(),
            level,
            SparsePoly::monomial(c, exp_num),
            SparsePoly::constant(1),
        ))
    }

    fn q_pow(&self, k: u32) -> u128 {
        (self.q() as u128).checked_pow(k).expect("exponent overflow: level too deep for the u128 representation")
    }
}

/// An element of K, stored in canonical form.
#[derive(Clone)]
pub struct PerfectFieldElement {
    field: PerfectField,
    level: u32,
    num: SparsePoly,
    den: SparsePoly,
}

impl PartialEq for PerfectFieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.num == other.num && self.den == other.den && self.field == other.field
    }
}

impl Eq for PerfectFieldElement {}

impl PerfectFieldElement {
    fn raw(field: PerfectField, level: u32, num: SparsePoly, den: SparsePoly) -> Self {
        PerfectFieldElement { field, level, num, den }
    }

    /// Builds `num/den` at the given level and reduces it to canonical form.
    pub fn from_parts(field: &PerfectField, level: u32, num: SparsePoly, den: SparsePoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !field.has_theta() && (num.degree().unwrap_or(0) > 0 || den.degree().unwrap_or(0) > 0) {
            return Err(Error::FieldMismatch("θ is not available when K = F_q".into()));
        }
        Ok(Self::normalize(field.clone(), level, num, den))
    }

    fn normalize(field: PerfectField, level: u32, num: SparsePoly, den: SparsePoly) -> Self {
        if num.is_zero() {
            return field.zero();
        }
        let fq = field.fq();
        let (num, den) = if den.is_one() {
            (num, den)
        } else if den.is_monomial() {
            let (k, c) = den.terms()[0];
            let shift = k.min(num.lowest_exponent().unwrap());
            let inv = fq.inv(c).expect("nonzero");
            (num.shift_down(shift).scale(fq, inv), SparsePoly::monomial(1, k - shift))
        } else {
            let g = num.gcd(fq, &den);
            let (n, d) = if g.is_one() { (num, den) } else { (num.exact_div(fq, &g), den.exact_div(fq, &g)) };
            let inv = fq.inv(d.leading_coeff()).expect("nonzero");
            (n.scale(fq, inv), d.scale(fq, inv))
        };
        Self::reduce_level(field, level, num, den)
    }

    /// Lowers the level while every exponent is divisible by q.
    fn reduce_level(field: PerfectField, level: u32, mut num: SparsePoly, mut den: SparsePoly) -> Self {
        let mut level = level;
        if level > 0 {
            let g = gcd_u128(num.exponent_gcd(), den.exponent_gcd());
            let q = field.q() as u128;
            if g == 0 {
                level = 0;
            } else {
                let mut factor = 1u128;
                let mut g = g;
                while level > 0 && g.is_multiple_of(q) {
                    g /= q;
                    factor *= q;
                    level -= 1;
                }
                if factor > 1 {
                    num = num.deflate(factor);
                    den = den.deflate(factor);
                }
            }
        }
        PerfectFieldElement { field, level, num, den }
    }

    pub fn field(&self) -> &PerfectField {
        &self.field
    }

    /// Smallest `m` with the element in F_q(θ^{1/q^m}).
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn numerator(&self) -> &SparsePoly {
        &self.num
    }

    pub fn denominator(&self) -> &SparsePoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The F_q code when the element is a constant.
    pub fn as_constant(&self) -> Option<u32> {
        if self.is_zero() {
            return Some(0);
        }
        (self.level == 0 && self.den.is_one() && self.num.is_monomial() && self.num.terms()[0].0 == 0)
            .then(|| self.num.terms()[0].1)
    }

    /// True for `c·θ^a`, `a ∈ ℤ[1/q]`.
    pub fn is_monomial(&self) -> bool {
        self.num.is_monomial() && self.den.is_monomial()
    }

    /// Total number of stored terms, a rough size measure.
    pub fn size(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    fn lifted(&self, level: u32) -> (SparsePoly, SparsePoly) {
        if level == self.level {
            return (self.num.clone(), self.den.clone());
        }
        let k = self.field.q_pow(level - self.level);
        (self.num.inflate(k), self.den.inflate(k))
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "operands belong to different fields");
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let fq = self.field.fq();
        let level = self.level.max(other.level);
        let (na, da) = self.lifted(level);
        let (nb, db) = other.lifted(level);
        if da == db {
            return Self::normalize(self.field.clone(), level, na.add(fq, &nb), da);
        }
        let num = na.mul(fq, &db).add(fq, &nb.mul(fq, &da));
        Self::normalize(self.field.clone(), level, num, da.mul(fq, &db))
    }

    pub fn neg_ref(&self) -> Self {
        PerfectFieldElement {
            field: self.field.clone(),
            level: self.level,
            num: self.num.neg(self.field.fq()),
            den: self.den.clone(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return self.field.zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale_fq(c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale_fq(c);
        }
        let fq = self.field.fq();
        let level = self.level.max(other.level);
        let (na, da) = self.lifted(level);
        let (nb, db) = other.lifted(level);
        if da.is_one() && db.is_one() {
            return Self::normalize(self.field.clone(), level, na.mul(fq, &nb), da);
        }
        // cross-cancel before multiplying to keep sizes down
        let g1 = na.gcd(fq, &db);
        let g2 = nb.gcd(fq, &da);
        let (na, db) = if g1.is_one() { (na, db) } else { (na.exact_div(fq, &g1), db.exact_div(fq, &g1)) };
        let (nb, da) = if g2.is_one() { (nb, da) } else { (nb.exact_div(fq, &g2), da.exact_div(fq, &g2)) };
        Self::normalize(self.field.clone(), level, na.mul(fq, &nb), da.mul(fq, &db))
    }

    fn scale_fq(&self, c: u32) -> Self {
        if c == 0 {
            return self.field.zero();
        }
        PerfectFieldElement {
            field: self.field.clone(),
            level: self.level,
            num: self.num.scale(self.field.fq(), c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.field.clone(), self.level, self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_ref(&b);
            }
        }
        Ok(acc)
    }

    /// `x^(q^k)`; for negative `k` the unique `q^{-k}`-th root.
    pub fn twist(&self, k: i64) -> Self {
        if k == 0 || self.is_zero() || self.as_constant().is_some() {
            return self.clone();
        }
        if k < 0 {
            let level = self.level.checked_add(k.unsigned_abs() as u32).expect("level overflow");
            return Self::reduce_level(self.field.clone(), level, self.num.clone(), self.den.clone());
        }
        let k = k as u64;
        if k <= self.level as u64 {
            return PerfectFieldElement {
                field: self.field.clone(),
                level: self.level - k as u32,
                num: self.num.clone(),
                den: self.den.clone(),
            };
        }
        let factor = self.field.q_pow((k - self.level as u64) as u32);
        PerfectFieldElement {
            field: self.field.clone(),
            level: 0,
            num: self.num.inflate(factor),
            den: self.den.inflate(factor),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&PerfectFieldElement> for &PerfectFieldElement {
            type Output = PerfectFieldElement;
            fn $method(self, rhs: &PerfectFieldElement) -> PerfectFieldElement {
                self.$imp(rhs)
            }
        }
        impl $tr<PerfectFieldElement> for PerfectFieldElement {
            type Output = PerfectFieldElement;
            fn $method(self, rhs: PerfectFieldElement) -> PerfectFieldElement {
                self.$imp(&rhs)
            }
        }
        impl $tr<&PerfectFieldElement> for PerfectFieldElement {
            type Output = PerfectFieldElement;
            fn $method(self, rhs: &PerfectFieldElement) -> PerfectFieldElement {
                self.$imp(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Div<&PerfectFieldElement> for &PerfectFieldElement {
    type Output = PerfectFieldElement;
    /// Panics on division by zero; use [`PerfectFieldElement::div_ref`] for a checked version.
    fn div(self, rhs: &PerfectFieldElement) -> PerfectFieldElement {
        self.div_ref(rhs).expect("division by zero")
    }
}

impl Neg for &PerfectFieldElement {
    type Output = PerfectFieldElement;
    fn neg(self) -> PerfectFieldElement {
        self.neg_ref()
    }
}

impl Neg for PerfectFieldElement {
    type Output = PerfectFieldElement;
    fn neg(self) -> PerfectFieldElement {
        self.neg_ref()
    }
}

impl fmt::Display for PerfectFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::render_element(self))
    }
}

impl fmt::Debug for PerfectFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> PerfectField {
        PerfectField::rational(q).unwrap()
    }

    #[test]
    fn theta_plus_theta() {
        let f = k(3);
        let th = f.theta().unwrap();
        let two_th = &th + &th;
        assert_eq!(two_th, &f.from_int(2) * &th);
        let f2 = k(2);
        let th2 = f2.theta().unwrap();
        assert!((&th2 + &th2).is_zero());
    }

    #[test]
    fn roots_multiply_at_level_one() {
        let f = k(3);
        let r = f.theta().unwrap().twist(-1);
        assert_eq!(r.level(), 1);
        let sq = &r * &r;
        assert_eq!(sq.level(), 1);
        assert_eq!(sq, f.theta_power(1, 2, 1).unwrap());
        // three copies give θ back at level 0
        let cube = &sq * &r;
        assert_eq!(cube, f.theta().unwrap());
        assert_eq!(cube.level(), 0);
    }

    #[test]
    fn gcd_normalization() {
        let f = k(5);
        let th = f.theta().unwrap();
        let one = f.one();
        let a = &(&th * &th) - &one;
        let b = &th - &one;
        assert_eq!(&a / &b, &th + &one);
    }

    #[test]
    fn twist_examples() {
        let f = k(3);
        let th = f.theta().unwrap();
        assert_eq!(th.twist(1), th.pow(3).unwrap());
        assert_eq!(th.twist(-1).pow(3).unwrap(), th);
        let c = f.from_int(2);
        assert_eq!(c.twist(5), c);
        assert_eq!(c.twist(-4), c);
    }

    #[test]
    fn division_by_zero() {
        let f = k(3);
        assert_eq!(f.one().div_ref(&f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn finite_field_mode_has_no_theta() {
        let f = PerfectField::new(FieldConfig::new(9, FieldMode::FiniteField).unwrap()).unwrap();
        assert!(f.theta().is_err());
        let z = f.generator();
        assert_eq!(z.twist(1), z.pow(9).unwrap());
    }
}
