//! Random instances for self-tests and property tests.
//!
//! Coefficients away from the τ⁰ diagonal are drawn from F_q so that the
//! twists performed during elimination do not inflate θ-levels.

use rand::Rng;

use crate::analyzer::TModule;
use crate::base_field::{PerfectField, PerfectFieldElement as Fe};
use crate::error::Result;
use crate::newton::Slope;
use crate::sigma_poly::SigmaTPoly;
use crate::skew_sigma::SkewLaurent;
use crate::skew_tau::{SkewTauPoly, TauMatrix};

/// A nonzero element of F_q.
pub fn nonzero_constant<R: Rng + ?Sized>(rng: &mut R, field: &PerfectField) -> Fe {
    field.from_fq(rng.gen_range(1..field.q()))
}

/// A nonzero constant, possibly multiplied by a power or a root of θ.
pub fn small_element<R: Rng + ?Sized>(rng: &mut R, field: &PerfectField, allow_theta: bool) -> Fe {
    let c = nonzero_constant(rng, field);
    if !allow_theta || !field.has_theta() || rng.gen_bool(0.5) {
        return c;
    }
    let th = field.theta().expect("theta");
    let t = match rng.gen_range(0..3) {
        0 => th,
        1 => th.pow(rng.gen_range(-2..=2)).expect("theta is a unit"),
        _ => th.twist(-rng.gen_range(1..=2)),
    };
    c.mul_ref(&t)
}

/// An exact series with at most `max_terms` terms supported in `lo..=hi`.
pub fn laurent<R: Rng + ?Sized>(
    rng: &mut R,
    field: &PerfectField,
    lo: i64,
    hi: i64,
    max_terms: usize,
    allow_theta: bool,
) -> SkewLaurent {
    let n = rng.gen_range(0..=max_terms);
    SkewLaurent::exact(field, (0..n).map(|_| (rng.gen_range(lo..=hi), small_element(rng, field, allow_theta))))
}

/// A polynomial in t of degree exactly `deg` with exact coefficients supported in `lo..=hi`.
pub fn sigma_t_poly<R: Rng + ?Sized>(
    rng: &mut R,
    field: &PerfectField,
    deg: usize,
    lo: i64,
    hi: i64,
    max_terms: usize,
) -> SigmaTPoly {
    let mut coeffs: Vec<SkewLaurent> = (0..deg).map(|_| laurent(rng, field, lo, hi, max_terms, false)).collect();
    let k = rng.gen_range(lo..=hi);
    coeffs.push(SkewLaurent::monomial(nonzero_constant(rng, field), k));
    SigmaTPoly::new(field, coeffs)
}

/// A monic polynomial whose Newton polygon is the single edge from
/// `(0, −slope·length)` to `(length, 0)`; `slope·length` must be an integer.
pub fn single_edge_monic<R: Rng + ?Sized>(
    rng: &mut R,
    field: &PerfectField,
    length: usize,
    slope: Slope,
) -> SigmaTPoly {
    let l = length as i64;
    let height = slope * l;
    assert!(height.is_integer(), "the edge must end on integer points");
    let mut coeffs = Vec::with_capacity(length + 1);
    coeffs.push(SkewLaurent::monomial(nonzero_constant(rng, field), -height.to_integer()));
    for i in 1..length {
        // strictly above the edge, or absent
        let line = slope * (l - i as i64);
        let floor = (-line).floor().to_integer() + 1;
        let x = if rng.gen_bool(0.6) {
            SkewLaurent::monomial(nonzero_constant(rng, field), floor + rng.gen_range(0..=1))
        } else {
            SkewLaurent::zero(field)
        };
        coeffs.push(x);
    }
    coeffs.push(SkewLaurent::one(field));
    SigmaTPoly::new(field, coeffs)
}

/// A random edge slope `a/b` with `b | length`.
pub fn slope_for_length<R: Rng + ?Sized>(rng: &mut R, length: usize, range: i64) -> Slope {
    let divisors: Vec<i64> = (1..=length as i64).filter(|b| length as i64 % b == 0).collect();
    let b = divisors[rng.gen_range(0..divisors.len())];
    Slope::new(rng.gen_range(-range * b..=range * b), b)
}

/// Shape parameters for [`tmodule`].
#[derive(Debug, Clone, Copy)]
pub struct ModuleShape {
    pub q: u64,
    pub d: usize,
    pub max_deg_tau: usize,
    pub max_terms: usize,
}

/// A t-module with `D₀ = θ·1 + N`, `N` strictly upper triangular over F_q,
/// and the remaining τ-coefficients in F_q; every entry has at most
/// `max_terms` terms.
pub fn tmodule<R: Rng + ?Sized>(rng: &mut R, shape: ModuleShape) -> Result<TModule> {
    let field = PerfectField::rational(shape.q)?;
    let th = field.theta()?;
    let d = shape.d;
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut terms: Vec<(usize, Fe)> = Vec::new();
            let mut budget = shape.max_terms;
            if i == j {
                terms.push((0, th.clone()));
                budget = budget.saturating_sub(1);
            } else if i < j && budget > 0 && rng.gen_bool(0.3) {
                terms.push((0, nonzero_constant(rng, &field)));
                budget -= 1;
            }
            let extra = rng.gen_range(0..=budget);
            for _ in 0..extra {
                if shape.max_deg_tau == 0 {
                    break;
                }
                let k = rng.gen_range(1..=shape.max_deg_tau);
                terms.push((k, nonzero_constant(rng, &field)));
            }
            entries.push(SkewTauPoly::from_coeffs(&field, terms));
        }
    }
    TModule::new(TauMatrix::new(d, entries)?, None)
}
