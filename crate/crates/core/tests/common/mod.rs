//! Shared strategies and independent oracles for the integration tests.
#![allow(dead_code)]

use num_rational::Ratio;
use proptest::prelude::*;
use tmodule_core::{PerfectField, PerfectFieldElement as Fe, SigmaMatrix, SkewLaurent};

pub fn field(q: u64) -> PerfectField {
    PerfectField::rational(q).expect("valid q")
}

/// Recipe for an element of K: a sum of terms `c·θ^(num/q^level)`, divided
/// by `θ + a` when a denominator is requested.
#[derive(Debug, Clone)]
pub struct ElementRecipe {
    pub terms: Vec<(u32, u128, u32)>,
    pub denominator: Option<u32>,
}

pub fn element_recipe() -> impl Strategy<Value = ElementRecipe> {
    (prop::collection::vec((1u32..8, 0u128..6, 0u32..3), 0..4), prop::option::of(0u32..8))
        .prop_map(|(terms, denominator)| ElementRecipe { terms, denominator })
}

pub fn build(f: &PerfectField, r: &ElementRecipe) -> Fe {
    let q = f.q();
    let mut x = f.zero();
    for &(c, num, level) in &r.terms {
        x = x + f.theta_power(c % q, num, level).unwrap();
    }
    if let Some(a) = r.denominator {
        let den = f.theta().unwrap() + f.from_fq(a % q);
        x = x.div_ref(&den).unwrap();
    }
    x
}

/// Sums of at most two terms `c·θ^(num/q^level)`, without denominators.
pub fn simple_element_recipe() -> impl Strategy<Value = ElementRecipe> {
    prop::collection::vec((1u32..8, 0u128..3, 0u32..2), 1..3)
        .prop_map(|terms| ElementRecipe { terms, denominator: None })
}

/// Exact series with simple coefficients.
pub fn simple_series_recipe(lo: i64, hi: i64, max_terms: usize) -> impl Strategy<Value = Vec<(i64, ElementRecipe)>> {
    prop::collection::vec((lo..=hi, simple_element_recipe()), 0..=max_terms)
}

/// Recipe for an exact series: `(order, element)` pairs.
pub fn series_recipe(lo: i64, hi: i64, max_terms: usize) -> impl Strategy<Value = Vec<(i64, ElementRecipe)>> {
    prop::collection::vec((lo..=hi, element_recipe()), 0..=max_terms)
}

pub fn build_series(f: &PerfectField, r: &[(i64, ElementRecipe)]) -> SkewLaurent {
    SkewLaurent::exact(f, r.iter().map(|(k, e)| (*k, build(f, e))))
}

/// Lower convex hull of integer points by brute force: the height at `x` is the
/// minimum over all chords (and single points) spanning `x`.
pub fn brute_hull_heights(points: &[(i64, i64)]) -> Vec<(i64, Ratio<i64>)> {
    let lo = points.iter().map(|p| p.0).min().unwrap();
    let hi = points.iter().map(|p| p.0).max().unwrap();
    (lo..=hi)
        .map(|x| {
            let mut best: Option<Ratio<i64>> = None;
            for &(x1, y1) in points {
                for &(x2, y2) in points {
                    let h = if x1 == x && x2 == x {
                        Ratio::from_integer(y1.min(y2))
                    } else if x1 < x2 && x1 <= x && x <= x2 {
                        Ratio::from_integer(y1) + Ratio::new((y2 - y1) * (x - x1), x2 - x1)
                    } else {
                        continue;
                    };
                    best = Some(best.map_or(h, |b: Ratio<i64>| b.min(h)));
                }
            }
            (x, best.expect("the point set covers every abscissa through chords"))
        })
        .collect()
}

/// Unit slopes `h(x+1) − h(x)` of the brute-force hull, sorted.
pub fn brute_unit_slopes(points: &[(i64, i64)]) -> Vec<Ratio<i64>> {
    let h = brute_hull_heights(points);
    let mut s: Vec<_> = h.windows(2).map(|w| w[1].1 - w[0].1).collect();
    s.sort();
    s
}

/// Vertices of the brute-force hull: endpoints and the abscissae where the slope changes.
pub fn brute_vertices(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let h = brute_hull_heights(points);
    let mut out = Vec::new();
    for (k, &(x, y)) in h.iter().enumerate() {
        let corner = k == 0 || k + 1 == h.len() || (h[k + 1].1 - y) != (y - h[k - 1].1);
        if corner {
            assert!(y.is_integer(), "hull vertices lie on input points");
            out.push((x, y.to_integer()));
        }
    }
    out
}

/// Rank of a matrix over K by plain Gaussian elimination.
pub fn field_rank(mut rows: Vec<Vec<Fe>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().unwrap();
        let pivot: Vec<Fe> = rows[rank].iter().map(|x| x * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&factor * y);
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// K-dimension of the image of `x ↦ x·B` on `(K{σ}/σ^s)^rows`, where `B` has
/// entries in `K⟨⟨σ⟩⟩`. The image is spanned by `σ^k·(row i)` for `k < s`.
pub fn image_dimension(b: &SigmaMatrix, s: usize) -> usize {
    let f = b.get(0, 0).field().clone();
    let mut rows = Vec::new();
    for i in 0..b.rows() {
        for k in 0..s as i64 {
            let mut v = Vec::with_capacity(b.cols() * s);
            for j in 0..b.cols() {
                let e = SkewLaurent::sigma_pow(&f, k).mul(b.get(i, j));
                for m in 0..s as i64 {
                    v.push(e.coeff(m));
                }
            }
            rows.push(v);
        }
    }
    field_rank(rows)
}

/// Number of invariant exponents `ν < s`, recovered from image dimensions:
/// `dim(s) − dim(s−1) = #{ν_i < s}`.
pub fn oracle_rank_mod(b: &SigmaMatrix, s: usize) -> usize {
    if s == 0 {
        return 0;
    }
    image_dimension(b, s) - image_dimension(b, s - 1)
}

/// Recipe for a polynomial in t over K((σ)) of exact degree `coeffs.len()`
/// whose leading coefficient is the monomial `c·σ^k`.
#[derive(Debug, Clone)]
pub struct PolyRecipe {
    pub coeffs: Vec<Vec<(i64, ElementRecipe)>>,
    pub lead: (i64, ElementRecipe),
}

pub fn poly_recipe(
    min_deg: usize,
    max_deg: usize,
    lo: i64,
    hi: i64,
    max_terms: usize,
) -> impl Strategy<Value = PolyRecipe> {
    let nonzero = (1u32..3, 0u128..3, 0u32..2).prop_map(|t| ElementRecipe { terms: vec![t], denominator: None });
    (prop::collection::vec(simple_series_recipe(lo, hi, max_terms), min_deg..=max_deg), (lo..=hi, nonzero))
        .prop_map(|(coeffs, lead)| PolyRecipe { coeffs, lead })
}

pub fn build_poly(f: &PerfectField, r: &PolyRecipe) -> tmodule_core::SigmaTPoly {
    let mut coeffs: Vec<SkewLaurent> = r.coeffs.iter().map(|c| build_series(f, c)).collect();
    let lead = build(f, &r.lead.1);
    coeffs.push(SkewLaurent::monomial(lead, r.lead.0));
    tmodule_core::SigmaTPoly::new(f, coeffs)
}

/// A module from entry strings, with ℓ = θ.
pub fn module(q: u64, rows: &[&[&str]]) -> tmodule_core::TModule {
    let f = field(q);
    let rows = rows.iter().map(|r| r.iter().map(|e| tmodule_core::expr::parse_tau(&f, e).unwrap()).collect()).collect();
    tmodule_core::TModule::new(tmodule_core::TauMatrix::from_rows(rows).unwrap(), None).unwrap()
}

/// `σ^shift·X` for a matrix `X` over K{τ}, computed entrywise.
fn shifted(f: &PerfectField, x: &tmodule_core::TauMatrix, shift: i64) -> Vec<Vec<SkewLaurent>> {
    let d = x.dim();
    (0..d).map(|i| (0..d).map(|j| SkewLaurent::sigma_pow(f, shift).mul(&x.get(i, j).to_sigma())).collect()).collect()
}

/// Re-derives a rank certificate from the powers of `φ_t` and checks it with
/// [`oracle_rank_mod`].
pub fn certificate_holds(m: &tmodule_core::TModule, cert: &tmodule_core::RankCertificate) -> bool {
    use tmodule_core::CertificateKind;
    let f = m.field().clone();
    let d = m.dim();
    let powers: Vec<_> = (1..=cert.n).map(|k| m.phi_t().mat_pow(k as u32)).collect();
    let s_n = powers.iter().filter_map(|p| p.deg_tau()).max().unwrap_or(0);
    let (rows, s): (Vec<Vec<SkewLaurent>>, usize) = match cert.kind {
        CertificateKind::PowerCondition => (shifted(&f, &powers[cert.n - 1], s_n as i64), s_n),
        CertificateKind::Sufficient => {
            let s = powers[cert.n - 1].deg_tau().unwrap_or(0);
            (shifted(&f, &powers[cert.n - 1], s as i64), s)
        }
        CertificateKind::BlockVertical => (powers.iter().flat_map(|p| shifted(&f, p, s_n as i64)).collect(), s_n),
        CertificateKind::BlockHorizontal => {
            let blocks: Vec<_> = powers.iter().map(|p| shifted(&f, p, s_n as i64)).collect();
            ((0..d).map(|i| blocks.iter().flat_map(|b| b[i].clone()).collect()).collect(), s_n)
        }
    };
    if s != cert.s_n {
        return false;
    }
    let (r, c) = (rows.len(), rows[0].len());
    let b = SigmaMatrix::new(r, c, rows.into_iter().flatten().collect()).unwrap();
    oracle_rank_mod(&b, s) == d
}
