//! Elimination over non-commutative rings: the σ-power diagonal form of a
//! matrix over the valuation ring (and its rank modulo σ^s), and the
//! diagonalization of `t·1 − D` over K((σ))[t].

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::base_field::PerfectField;
use crate::error::{Error, Result};
use crate::newton::{Edge, NewtonPolygon};
use crate::sigma_poly::SigmaTPoly;
use crate::skew_sigma::{QuotientRingElement, SkewLaurent};
use crate::skew_tau::TauMatrix;

/// A rectangular matrix over K((σ)), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<SkewLaurent>,
}

impl SigmaMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<SkewLaurent>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(SigmaMatrix { rows, cols, entries })
    }

    pub fn zero(field: &PerfectField, rows: usize, cols: usize) -> Self {
        SigmaMatrix { rows, cols, entries: vec![SkewLaurent::zero(field); rows * cols] }
    }

    /// `σ^k·1`.
    pub fn scalar_sigma(field: &PerfectField, d: usize, k: i64) -> Self {
        let mut out = Self::zero(field, d, d);
        for i in 0..d {
            out.entries[i * d + i] = SkewLaurent::sigma_pow(field, k);
        }
        out
    }

    pub fn diagonal(field: &PerfectField, diag: Vec<SkewLaurent>) -> Self {
        let d = diag.len();
        let mut out = Self::zero(field, d, d);
        for (i, x) in diag.into_iter().enumerate() {
            out.entries[i * d + i] = x;
        }
        out
    }

    /// `σ^shift · D` with `τ^i ↦ σ^{−i}`.
    pub fn from_tau_matrix(m: &TauMatrix, shift: i64) -> Self {
        let d = m.dim();
        let entries = m.entries().iter().map(|e| e.to_sigma().shift_left(shift)).collect();
        SigmaMatrix { rows: d, cols: d, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &SkewLaurent {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[SkewLaurent] {
        &self.entries
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[SigmaMatrix]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch("vertical blocks differ in width".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let entries = blocks.iter().flat_map(|b| b.entries.iter().cloned()).collect();
        Self::new(rows, cols, entries)
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(blocks: &[SigmaMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("horizontal blocks differ in height".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                entries.extend(b.entries[i * b.cols..(i + 1) * b.cols].iter().cloned());
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let field = self.entries.first().map(|e| e.field().clone());
        let Some(field) = field else {
            return Self::new(self.rows, other.cols, Vec::new());
        };
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = SkewLaurent::zero(&field);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_exact_zero() && !b.is_exact_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        Self::new(self.rows, other.cols, entries)
    }
}

/// The exponents `ν_1 ≤ … ≤ ν_k` below `s` of the σ-power diagonal form of a
/// matrix over the valuation ring; `at_least_s` counts the remaining diagonal
/// positions, whose exponents are `≥ s` (or the entry is zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalProfile {
    pub s: usize,
    pub nu: Vec<usize>,
    pub at_least_s: usize,
}

impl DiagonalProfile {
    pub fn rank(&self) -> usize {
        self.nu.len()
    }
}

/// Diagonal exponents of `B` modulo `σ^s`, by elimination in K{σ}/(σ^s).
pub fn diagonal_profile_mod(b: &SigmaMatrix, s: usize) -> Result<DiagonalProfile> {
    let (rows, cols) = (b.rows, b.cols);
    let mut m: Vec<QuotientRingElement> =
        b.entries.iter().map(|x| QuotientRingElement::from_laurent(x, s)).collect::<Result<_>>()?;
    let at = |i: usize, j: usize| i * cols + j;
    let mut nu = Vec::new();
    let n = rows.min(cols);
    for k in 0..n {
        // minimal valuation in the remaining block
        let mut best: Option<(usize, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(v) = m[at(i, j)].valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        for j in 0..cols {
            m.swap(at(k, j), at(pi, j));
        }
        for i in 0..rows {
            m.swap(at(i, k), at(i, pj));
        }
        let pivot = m[at(k, k)].clone();
        // pivot = u·σ^v = σ^v·u'
        let u_inv = pivot.strip_right(v).invert()?.resize(s);
        let u_left_inv = pivot.strip_left(v).invert()?.resize(s);
        for i in k + 1..rows {
            let e = &m[at(i, k)];
            if e.is_zero() {
                continue;
            }
            let x = e.strip_right(v).resize(s).mul(&u_inv);
            for j in k..cols {
                let delta = x.mul(&m[at(k, j)]);
                m[at(i, j)] = m[at(i, j)].sub(&delta);
            }
        }
        for j in k + 1..cols {
            let e = &m[at(k, j)];
            if e.is_zero() {
                continue;
            }
            let y = u_left_inv.mul(&e.strip_left(v).resize(s));
            for i in k..rows {
                let delta = m[at(i, k)].mul(&y);
                m[at(i, j)] = m[at(i, j)].sub(&delta);
            }
        }
        nu.push(v);
    }
    let at_least_s = n - nu.len();
    Ok(DiagonalProfile { s, nu, at_least_s })
}

/// Number of diagonal exponents below `s`.
pub fn rank_mod(b: &SigmaMatrix, s: usize) -> Result<usize> {
    Ok(diagonal_profile_mod(b, s)?.rank())
}

/// A square matrix over K((σ))[t].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTMatrix {
    d: usize,
    entries: Vec<SigmaTPoly>,
}

impl SigmaTMatrix {
    pub fn new(d: usize, entries: Vec<SigmaTPoly>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!("expected {} entries, got {}", d * d, entries.len())));
        }
        Ok(SigmaTMatrix { d, entries })
    }

    /// `t·1 − D_σ`.
    pub fn characteristic(m: &TauMatrix) -> Self {
        let d = m.dim();
        let field = m.field().clone();
        let entries = (0..d * d)
            .map(|idx| {
                let minus = SigmaTPoly::constant(m.entries()[idx].to_sigma().neg());
                if idx / d == idx % d {
                    SigmaTPoly::t(&field).add(&minus)
                } else {
                    minus
                }
            })
            .collect();
        SigmaTMatrix { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &SigmaTPoly {
        &self.entries[i * self.d + j]
    }
}

/// Settings for [`diagonalize_sigma_t`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    /// Starting absolute σ-precision.
    pub precision: i64,
    /// Largest precision tried before ambiguous zeros are assumed to vanish.
    pub precision_cap: i64,
    /// Randomizes the choice among pivots of minimal t-degree.
    pub seed: Option<u64>,
}

impl DiagonalizeOptions {
    /// `N₀ = 4·(d·(s+1)+4)` for dimension `d` and τ-degree `s`, clamped to half of
    /// [`level_safe_precision`], which is also the cap.
    pub fn for_module(field: &PerfectField, d: usize, deg_tau: usize) -> Self {
        let safe = level_safe_precision(field, d, deg_tau);
        let n0 = (4 * (d as i64 * (deg_tau as i64 + 1) + 4)).min(safe / 2);
        DiagonalizeOptions { precision: n0, precision_cap: safe, seed: None }
    }
}

/// Largest absolute σ-precision for which the θ-levels reached during
/// elimination keep exponents well inside `u128`.
///
/// A coefficient of `σ^k` picks up twists by up to `k`, so the level grows
/// with the precision; exponents at level `m` carry a factor `q^m`.
pub fn level_safe_precision(field: &PerfectField, d: usize, deg_tau: usize) -> i64 {
    if !field.has_theta() {
        return 1 << 12;
    }
    let q = field.q() as u128;
    let mut levels = 0i64;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(q).filter(|&x| x < 1u128 << 96) {
        acc = next;
        levels += 1;
    }
    (levels - 2 * (d * deg_tau) as i64 - 4).max(8)
}

/// Diagonal entries of a diagonal form of `t·1 − D`, each monic (or zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalization {
    pub entries: Vec<SigmaTPoly>,
    pub precision_used: i64,
    /// Some entry that only vanished to the working precision was taken as zero.
    pub precision_assumed: bool,
}

impl Diagonalization {
    /// Entries of positive t-degree (the others are units).
    pub fn nontrivial(&self) -> impl Iterator<Item = &SigmaTPoly> {
        self.entries.iter().filter(|e| e.degree().is_some_and(|d| d > 0))
    }
}

enum RunError {
    Ambiguous,
    Fatal(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::AmbiguousZero { .. } | Error::AmbiguousValuation { .. } => RunError::Ambiguous,
            e => RunError::Fatal(e),
        }
    }
}

/// Two-sided Euclidean elimination of `C` with adaptive precision.
pub fn diagonalize_sigma_t(c: &SigmaTMatrix, opts: &DiagonalizeOptions) -> Result<Diagonalization> {
    let mut precision = opts.precision.max(1);
    loop {
        let assume = precision >= opts.precision_cap;
        match run_elimination(c, precision, assume, opts.seed) {
            Ok((entries, assumed)) => {
                return Ok(Diagonalization { entries, precision_used: precision, precision_assumed: assumed })
            }
            Err(RunError::Ambiguous) if !assume => precision = (precision * 2).min(opts.precision_cap),
            Err(RunError::Ambiguous) => {
                return Err(Error::PrecisionExhausted {
                    reason: "diagonal entries stay ambiguous at the precision cap".into(),
                    suggested: precision * 2,
                })
            }
            Err(RunError::Fatal(e)) => return Err(e),
        }
    }
}

/// Drops trailing coefficients that only vanish to precision; reports whether any did.
fn settle(p: &SigmaTPoly, assume: bool) -> std::result::Result<(SigmaTPoly, bool), RunError> {
    let coeffs = p.coeffs();
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].is_zero_to_precision() {
        end -= 1;
    }
    if end == coeffs.len() {
        return Ok((p.clone(), false));
    }
    if !assume {
        return Err(RunError::Ambiguous);
    }
    Ok((SigmaTPoly::new(p.field(), coeffs[..end].to_vec()), true))
}

fn run_elimination(
    c: &SigmaTMatrix,
    precision: i64,
    assume: bool,
    seed: Option<u64>,
) -> std::result::Result<(Vec<SigmaTPoly>, bool), RunError> {
    let d = c.d;
    let mut m = c.entries.clone();
    let at = |i: usize, j: usize| i * d + j;
    let mut rng = seed.map(StdRng::seed_from_u64);
    let mut assumed = false;
    for k in 0..d {
        loop {
            // settle the block and collect candidates (degree, v_0, i, j)
            let mut cands: Vec<(usize, i64, usize, usize)> = Vec::new();
            for i in k..d {
                for j in k..d {
                    let (p, a) = settle(&m[at(i, j)], assume)?;
                    assumed |= a;
                    m[at(i, j)] = p;
                    let p = &m[at(i, j)];
                    if let Some(deg) = p.degree() {
                        let v0 = p.coeffs().iter().filter_map(|x| x.valuation().known()).min().unwrap_or(i64::MAX);
                        cands.push((deg, v0, i, j));
                    }
                }
            }
            if cands.is_empty() {
                break;
            }
            let (_, _, pi, pj) = match rng.as_mut() {
                None => *cands.iter().min().expect("nonempty"),
                Some(rng) => {
                    let min_deg = cands.iter().map(|c| c.0).min().expect("nonempty");
                    let pool: Vec<_> = cands.iter().filter(|c| c.0 == min_deg).collect();
                    **pool.choose(rng).expect("nonempty")
                }
            };
            for j in 0..d {
                m.swap(at(k, j), at(pi, j));
            }
            for i in 0..d {
                m.swap(at(i, k), at(i, pj));
            }
            let pivot = m[at(k, k)].clone();
            for i in k + 1..d {
                if m[at(i, k)].is_exact_zero() {
                    continue;
                }
                let (q, r) = m[at(i, k)].right_divide(&pivot, precision)?;
                for j in k + 1..d {
                    let delta = q.mul(&m[at(k, j)]);
                    m[at(i, j)] = m[at(i, j)].sub(&delta).truncate(precision);
                }
                m[at(i, k)] = r.truncate(precision);
            }
            for j in k + 1..d {
                if m[at(k, j)].is_exact_zero() {
                    continue;
                }
                let (q, r) = m[at(k, j)].left_divide(&pivot, precision)?;
                for i in k + 1..d {
                    let delta = m[at(i, k)].mul(&q);
                    m[at(i, j)] = m[at(i, j)].sub(&delta).truncate(precision);
                }
                m[at(k, j)] = r.truncate(precision);
            }
            let mut clear = true;
            for idx in (k + 1..d).flat_map(|o| [at(o, k), at(k, o)]) {
                let (p, a) = settle(&m[idx], assume)?;
                assumed |= a;
                m[idx] = p;
                clear &= m[idx].is_exact_zero();
            }
            if clear {
                break;
            }
        }
    }
    let mut diag = Vec::with_capacity(d);
    for k in 0..d {
        let p = m[at(k, k)].clone();
        let normalized = match p.leading_coeff() {
            None => p,
            Some(lead) => {
                let v = lead.valuation().known().ok_or(Error::AmbiguousValuation { index: k })?;
                let inv = lead.invert(precision - v)?;
                let mut monic = p.scale_left(&inv);
                // the leading coefficient is one by construction
                let deg = monic.degree().expect("nonzero");
                let mut coeffs = monic.coeffs().to_vec();
                coeffs[deg] = SkewLaurent::one(p.field());
                monic = SigmaTPoly::new(p.field(), coeffs);
                monic
            }
        };
        if normalized.degree().is_some_and(|deg| deg > 0) {
            normalized.newton_polygon()?;
        }
        diag.push(normalized);
    }
    Ok((diag, assumed))
}

/// Edges of all diagonal entries, sorted by slope and then length.
pub fn aggregated_edges(diag: &[SigmaTPoly]) -> Result<Vec<Edge>> {
    let mut edges = Vec::new();
    for p in diag {
        if p.degree().is_some_and(|d| d > 0) {
            edges.extend(p.newton_polygon()?.edges());
        }
    }
    edges.sort_by(|a, b| a.slope.cmp(&b.slope).then(a.length.cmp(&b.length)));
    Ok(edges)
}

/// Newton polygons of the entries of positive degree.
pub fn entry_polygons(diag: &[SigmaTPoly]) -> Result<Vec<NewtonPolygon>> {
    diag.iter().filter(|p| p.degree().is_some_and(|d| d > 0)).map(|p| p.newton_polygon()).collect()
}
