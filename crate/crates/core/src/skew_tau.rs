//! The twisted polynomial ring K{τ} with `τ·α = α^q·τ`, and square matrices over it.

use std::collections::BTreeMap;
use std::fmt;

use crate::base_field::{PerfectField, PerfectFieldElement as Fe};
use crate::error::{Error, Result};
use crate::skew_sigma::SkewLaurent;

/// A skew polynomial `∑ α_i τ^i`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewTauPoly {
    field: PerfectField,
    coeffs: BTreeMap<usize, Fe>,
}

impl SkewTauPoly {
    pub fn zero(field: &PerfectField) -> Self {
        SkewTauPoly { field: field.clone(), coeffs: BTreeMap::new() }
    }

    pub fn constant(c: Fe) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one(field: &PerfectField) -> Self {
        Self::constant(field.one())
    }

    /// `τ`.
    pub fn tau(field: &PerfectField) -> Self {
        Self::monomial(field.one(), 1)
    }

    /// `c·τ^k`.
    pub fn monomial(c: Fe, k: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        SkewTauPoly { field, coeffs }
    }

    pub fn from_coeffs(field: &PerfectField, coeffs: impl IntoIterator<Item = (usize, Fe)>) -> Self {
        let mut out = Self::zero(field);
        for (k, c) in coeffs {
            out.add_term(k, c);
        }
        out
    }

    fn add_term(&mut self, k: usize, c: Fe) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&k) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.coeffs.insert(k, s);
                }
            }
            None => {
                self.coeffs.insert(k, c);
            }
        }
    }

    pub fn field(&self) -> &PerfectField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// τ-degree; `None` stands for −∞ (the zero polynomial).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, k: usize) -> Fe {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Fe)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// Returns the coefficient as an element of K when the polynomial has degree ≤ 0.
    pub fn as_scalar(&self) -> Option<Fe> {
        match self.degree() {
            None => Some(self.field.zero()),
            Some(0) => Some(self.coeff(0)),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SkewTauPoly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|(&k, c)| (k, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `(∑ α_i τ^i)(∑ β_j τ^j) = ∑_k (∑_i α_i β_{k−i}^{q^i}) τ^k`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.field);
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out.add_term(i + j, a * &b.twist(i as i64));
            }
        }
        out
    }

    /// Left multiplication by a scalar.
    pub fn scale_left(&self, c: &Fe) -> Self {
        Self::from_coeffs(&self.field, self.coeffs.iter().map(|(&k, a)| (k, c * a)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Image under `τ^i ↦ σ^{−i}` in K((σ)).
    pub fn to_sigma(&self) -> SkewLaurent {
        SkewLaurent::exact(&self.field, self.coeffs.iter().map(|(&k, c)| (-(k as i64), c.clone())))
    }
}

impl fmt::Display for SkewTauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::render_tau(self))
    }
}

impl fmt::Debug for SkewTauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A square `d×d` matrix over K{τ}, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct TauMatrix {
    d: usize,
    entries: Vec<SkewTauPoly>,
}

impl TauMatrix {
    pub fn new(d: usize, entries: Vec<SkewTauPoly>) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionMismatch("dimension must be at least 1".into()));
        }
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!("expected {} entries, got {}", d * d, entries.len())));
        }
        Ok(TauMatrix { d, entries })
    }

    pub fn from_rows(rows: Vec<Vec<SkewTauPoly>>) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        Self::new(d, rows.into_iter().flatten().collect())
    }

    pub fn identity(field: &PerfectField, d: usize) -> Self {
        let entries = (0..d * d)
            .map(|idx| if idx / d == idx % d { SkewTauPoly::one(field) } else { SkewTauPoly::zero(field) })
            .collect();
        TauMatrix { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &PerfectField {
        self.entries[0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &SkewTauPoly {
        &self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[SkewTauPoly] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[SkewTauPoly]> {
        self.entries.chunks(self.d)
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.d, self.d, other.d, other.d)));
        }
        let d = self.d;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = SkewTauPoly::zero(self.field());
                for k in 0..d {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        Ok(TauMatrix { d, entries })
    }

    /// `M^n` for `n ≥ 1` (n = 0 gives the identity).
    pub fn mat_pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.field(), self.d);
        for _ in 0..n {
            acc = acc.mat_mul(self).expect("same dimension");
        }
        acc
    }

    /// `[M, M², …, M^n]`, each computed from its predecessor.
    pub fn powers(&self, n: usize) -> Vec<TauMatrix> {
        let mut out: Vec<TauMatrix> = Vec::with_capacity(n);
        for k in 0..n {
            let next = match k {
                0 => self.clone(),
                _ => out[k - 1].mat_mul(self).expect("same dimension"),
            };
            out.push(next);
        }
        out
    }

    /// Maximal τ-degree of the entries; `None` for the zero matrix.
    pub fn deg_tau(&self) -> Option<usize> {
        self.entries.iter().filter_map(|e| e.degree()).max()
    }

    /// Coefficient matrix of `τ^k`, row-major.
    pub fn coefficient_matrix(&self, k: usize) -> Vec<Fe> {
        self.entries.iter().map(|e| e.coeff(k)).collect()
    }
}

impl fmt::Display for TauMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|r| format!("[{}]", r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for TauMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Least `s ≥ 0` such that every entry of `D, D², …, D^n` has σ-valuation at least `−s`,
/// i.e. the largest τ-degree occurring among those powers.
pub fn s_n(powers: &[TauMatrix]) -> usize {
    powers.iter().filter_map(|m| m.deg_tau()).max().unwrap_or(0)
}
