//! Polynomials in a central variable `t` over K((σ)): Newton polygons, the
//! valuations `v_c`, division with remainder on either side and the
//! factorization of a polynomial along the edges of its Newton polygon.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;

use crate::base_field::PerfectField;
use crate::error::{Error, Result};
use crate::newton::{HullPoint, NewtonPolygon, Slope};
use crate::skew_sigma::{Precision, SkewLaurent, Valuation};

/// `∑ a_i t^i` with `a_i ∈ K((σ))`; trailing exact zeros are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SigmaTPoly {
    field: PerfectField,
    coeffs: Vec<SkewLaurent>,
}

/// Which side the extracted factor sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `h = f·g`: the factor `f` is a left factor.
    Left,
    /// `h = g·f`: the factor `f` is a right factor.
    Right,
}

fn ceil_ratio(x: Ratio<i64>) -> i64 {
    x.numer().div_ceil(x.denom())
}

impl SigmaTPoly {
    pub fn zero(field: &PerfectField) -> Self {
        SigmaTPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &PerfectField) -> Self {
        Self::constant(SkewLaurent::one(field))
    }

    /// The variable `t`.
    pub fn t(field: &PerfectField) -> Self {
        Self::new(field, vec![SkewLaurent::zero(field), SkewLaurent::one(field)])
    }

    pub fn constant(c: SkewLaurent) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    /// `c·t^k`.
    pub fn monomial(c: SkewLaurent, k: usize) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![SkewLaurent::zero(&field); k];
        coeffs.push(c);
        Self::new(&field, coeffs)
    }

    pub fn new(field: &PerfectField, coeffs: Vec<SkewLaurent>) -> Self {
        let mut out = SigmaTPoly { field: field.clone(), coeffs };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &PerfectField {
        &self.field
    }

    pub fn coeffs(&self) -> &[SkewLaurent] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> SkewLaurent {
        self.coeffs.get(i).cloned().unwrap_or_else(|| SkewLaurent::zero(&self.field))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero as far as the known coefficients go.
    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_to_precision())
    }

    /// Index of the last stored coefficient; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, provided the leading coefficient is known to be nonzero.
    pub fn known_degree(&self) -> Result<usize> {
        let d = self.degree().ok_or(Error::DivisionByZeroPoly)?;
        match self.coeffs[d].valuation() {
            Valuation::Known(_) => Ok(d),
            _ => Err(Error::AmbiguousValuation { index: d }),
        }
    }

    pub fn leading_coeff(&self) -> Option<&SkewLaurent> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| c.is_exact_one())
    }

    /// Coarsest precision among the coefficients.
    pub fn precision(&self) -> Precision {
        self.coeffs.iter().fold(Precision::Exact, |p, c| p.min(c.precision()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }

    /// Product with central `t`: `(∑ a_i t^i)(∑ b_j t^j) = ∑ a_i b_j t^{i+j}`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.field);
        }
        let mut coeffs = vec![SkewLaurent::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.field, coeffs)
    }

    /// `c·f`.
    pub fn scale_left(&self, c: &SkewLaurent) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| c.mul(a)).collect())
    }

    /// `f·c`.
    pub fn scale_right(&self, c: &SkewLaurent) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Truncates every coefficient at the same absolute σ-precision.
    pub fn truncate(&self, n: i64) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a.truncate(n)).collect())
    }

    /// Truncates coefficient `i` at `⌈n − i·c⌉`, i.e. keeps what is visible to
    /// `v_c` below `n`.
    pub fn truncate_c(&self, n: Ratio<i64>, c: Ratio<i64>) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, a)| a.truncate(ceil_ratio(n - c * i as i64))).collect();
        Self::new(&self.field, coeffs)
    }

    /// Points `(i, v(a_i))` with the three-valued valuation.
    pub fn points(&self) -> Vec<(usize, Valuation)> {
        self.coeffs.iter().enumerate().map(|(i, c)| (i, c.valuation())).collect()
    }

    fn hull_points(&self) -> Vec<HullPoint> {
        self.points()
            .into_iter()
            .filter_map(|(i, v)| match v {
                Valuation::Known(w) => Some(HullPoint::Known(i as i64, w)),
                Valuation::Indistinguishable(n) => Some(HullPoint::AtLeast(i as i64, n)),
                Valuation::ZeroExact => None,
            })
            .collect()
    }

    /// The known points `(i, v(a_i))`.
    pub fn known_points(&self) -> Vec<(i64, i64)> {
        self.points().into_iter().filter_map(|(i, v)| v.known().map(|w| (i as i64, w))).collect()
    }

    /// Newton polygon; coefficients that are only bounded below must lie on
    /// or above the polygon of the known ones.
    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        if self.degree().is_none() {
            return Err(Error::DivisionByZeroPoly);
        }
        self.known_degree()?;
        NewtonPolygon::from_bounded_points(&self.hull_points())
    }

    /// `v_c(f) = min_i v(a_i) + i·c`; `None` is +∞.
    pub fn v_c(&self, c: Ratio<i64>) -> Result<Option<Ratio<i64>>> {
        let known = self.v_c_known(c);
        for (i, v) in self.points() {
            if let Valuation::Indistinguishable(n) = v {
                let bound = Ratio::from_integer(n) + c * i as i64;
                if known.is_none_or(|k| bound < k) {
                    return Err(Error::AmbiguousValuation { index: i });
                }
            }
        }
        Ok(known)
    }

    fn v_c_known(&self, c: Ratio<i64>) -> Option<Ratio<i64>> {
        self.points().into_iter().filter_map(|(i, v)| v.known().map(|w| Ratio::from_integer(w) + c * i as i64)).min()
    }

    /// A lower bound for `v_c` that treats unknown tails as their bound; `None` is +∞.
    pub fn v_c_lower_bound(&self, c: Ratio<i64>) -> Option<Ratio<i64>> {
        self.points()
            .into_iter()
            .filter_map(|(i, v)| v.lower_bound().map(|w| Ratio::from_integer(w) + c * i as i64))
            .min()
    }

    /// `h = q·f + r` with `deg r < deg f`. The leading coefficient of `f` is
    /// inverted to relative precision `rel_prec`.
    pub fn right_divide(&self, f: &Self, rel_prec: i64) -> Result<(Self, Self)> {
        self.divide(f, rel_prec, Side::Right)
    }

    /// `h = f·q + r` with `deg r < deg f`.
    pub fn left_divide(&self, f: &Self, rel_prec: i64) -> Result<(Self, Self)> {
        self.divide(f, rel_prec, Side::Left)
    }

    fn divide(&self, f: &Self, rel_prec: i64, side: Side) -> Result<(Self, Self)> {
        let d = f.known_degree()?;
        let lead = &f.coeffs[d];
        let v_lead = lead.valuation().known().expect("checked by known_degree");
        let lead_inv = lead.invert(rel_prec - v_lead)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Self::zero(&self.field), self.clone()));
        }
        let n = rem.len() - 1;
        let mut q = vec![SkewLaurent::zero(&self.field); n - d + 1];
        for k in (d..=n).rev() {
            if rem[k].is_exact_zero() {
                continue;
            }
            let qk = match side {
                Side::Right => rem[k].mul(&lead_inv),
                Side::Left => lead_inv.mul(&rem[k]),
            };
            for (j, fj) in f.coeffs.iter().enumerate().take(d) {
                if fj.is_exact_zero() {
                    continue;
                }
                let prod = match side {
                    Side::Right => qk.mul(fj),
                    Side::Left => fj.mul(&qk),
                };
                rem[k - d + j] = rem[k - d + j].sub(&prod);
            }
            // the leading term cancels by construction
            rem[k] = SkewLaurent::zero(&self.field);
            q[k - d] = qk;
        }
        rem.truncate(d);
        Ok((Self::new(&self.field, q), Self::new(&self.field, rem)))
    }

    /// Splits off the first edge of the Newton polygon by the lifting
    /// iteration. `Side::Left` returns `(f, g)` with `h = f·g`, `Side::Right`
    /// returns `(f, g)` with `h = g·f`; in both cases `N_f` is the first edge
    /// of `N_h` and `v_c(h − product) ≥ v_c(h) + gain` for `c = −(first slope)`.
    pub fn factor_first_edge(&self, side: Side, gain: Ratio<i64>) -> Result<(Self, Self)> {
        let np = self.newton_polygon()?;
        let edges = np.edges();
        if edges.len() < 2 {
            return Err(Error::SingleEdge);
        }
        let c = -edges[0].slope;
        let d = np.vertices()[1].0 as usize;
        let vch = self.v_c(c)?.expect("nonzero polynomial");
        let target = vch + gain;
        let f0 = Self::new(&self.field, self.coeffs[..=d].to_vec());
        let mut f = f0.truncate_c(target, c);
        let mut g = Self::one(&self.field);
        // relative precision for inverting the leading coefficient of f
        let rel = ceil_ratio(gain).max(1) + 1;
        let max_steps = 64 + 4 * ceil_ratio(gain).max(0) as usize * (self.coeffs.len() + 1);
        for _ in 0..max_steps {
            let product = match side {
                Side::Left => f.mul(&g),
                Side::Right => g.mul(&f),
            };
            let residual = self.sub(&product);
            let bound = residual.v_c_lower_bound(c);
            if bound.is_none_or(|b| b >= target) {
                return Ok((f, g));
            }
            if residual.is_zero_to_precision() {
                return Err(Error::PrecisionExhausted {
                    reason: "the factorization residual is not resolved by the input precision".into(),
                    suggested: 2 * ceil_ratio(target).max(1),
                });
            }
            let (q, r) = match side {
                Side::Left => residual.left_divide(&f, rel)?,
                Side::Right => residual.right_divide(&f, rel)?,
            };
            f = f.add(&r).truncate_c(target, c);
            g = g.add(&q).truncate_c(gain, c);
        }
        Err(Error::PrecisionExhausted {
            reason: "the lifting iteration did not reach the requested gain".into(),
            suggested: 2 * ceil_ratio(target).max(1),
        })
    }

    /// Factors a monic `h` as `f_1·f_2⋯f_k` with monic single-edge factors in
    /// order of increasing slope, such that every coefficient of
    /// `h − f_1⋯f_k` vanishes below absolute σ-order `precision`.
    pub fn slope_decomposition(&self, precision: i64) -> Result<Vec<Self>> {
        if !self.is_monic() {
            return Err(Error::FieldMismatch("slope decomposition expects a monic polynomial".into()));
        }
        let mut slack = 2;
        for _ in 0..6 {
            let factors = self.decompose_with_slack(precision, slack)?;
            let product = factors.iter().fold(Self::one(&self.field), |acc, f| acc.mul(f));
            let residual = self.sub(&product);
            if residual.v_c_lower_bound(Ratio::from_integer(0)).is_none_or(|b| b >= Ratio::from_integer(precision)) {
                return Ok(factors);
            }
            slack *= 2;
        }
        Err(Error::PrecisionExhausted {
            reason: "slope decomposition residual above the requested precision".into(),
            suggested: 2 * precision.max(1),
        })
    }

    /// `min_i (N_i + i·c)` over coefficients known to absolute precision `N_i`;
    /// `None` when every coefficient is exact.
    fn v_c_precision(&self, c: Ratio<i64>) -> Option<Ratio<i64>> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.precision().bound().map(|n| Ratio::from_integer(n) + c * i as i64))
            .min()
    }

    fn decompose_with_slack(&self, precision: i64, slack: i64) -> Result<Vec<Self>> {
        let mut factors = Vec::new();
        let mut rest = self.clone();
        loop {
            let np = rest.newton_polygon()?;
            if np.edges().len() < 2 {
                factors.push(rest.with_unit_lead());
                return Ok(factors);
            }
            let c = -np.edges()[0].slope;
            let n = rest.degree().unwrap_or(0) as i64;
            let vch = rest.v_c(c)?.expect("nonzero polynomial");
            // a v_c bound of T gives coefficientwise σ-order T − i·c
            let wanted = Ratio::from_integer(precision + slack) + c.max(Ratio::from_integer(0)) * n;
            let target = rest.v_c_precision(c).map_or(wanted, |p| p.min(wanted));
            let gain = (target - vch).max(Ratio::from_integer(1));
            let (f, g) = rest.factor_first_edge(Side::Left, gain)?;
            let lead = f.leading_coeff().expect("nonzero factor").clone();
            let abs = precision + slack + n * (ceil_ratio(c.abs()) + 1);
            let lead_inv = lead.invert(abs)?;
            factors.push(f.scale_right(&lead_inv).with_unit_lead());
            rest = g.scale_left(&lead).truncate(abs);
        }
    }

    /// Replaces a leading coefficient that equals 1 to its precision by an exact 1.
    fn with_unit_lead(mut self) -> Self {
        if let Some(last) = self.coeffs.last_mut() {
            debug_assert!(last.sub(&SkewLaurent::one(&self.field)).is_zero_to_precision());
            *last = SkewLaurent::one(&self.field);
        }
        self
    }

    /// Slopes of the Newton polygon.
    pub fn slopes(&self) -> Result<Vec<Slope>> {
        Ok(self.newton_polygon()?.slopes())
    }
}

impl fmt::Display for SigmaTPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                i => format!("({c})*t^{i}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for SigmaTPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_laurent;
    use crate::newton::Edge;

    fn k(q: u64) -> PerfectField {
        PerfectField::rational(q).unwrap()
    }

    fn poly(f: &PerfectField, coeffs: &[&str]) -> SigmaTPoly {
        SigmaTPoly::new(f, coeffs.iter().map(|s| parse_laurent(f, s).unwrap()).collect())
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn product_example_data() {
        let f = k(3);
        let g = poly(&f, &["s^3", "th*s", "0", "0", "1"]);
        let lin = poly(&f, &["s", "1"]);
        let h = poly(&f, &["s^4", "th*s^2 + s^3", "th*s", "0", "s", "1"]);
        assert_eq!(g.mul(&lin), h);
        let np = h.newton_polygon().unwrap();
        assert_eq!(np.vertices(), &[(0, 4), (1, 2), (2, 1), (5, 0)]);
        let (q, rem) = h.right_divide(&lin, 10).unwrap();
        assert_eq!((q, rem.is_exact_zero()), (g.clone(), true));
        let (q, rem) = h.left_divide(&g, 10).unwrap();
        assert_eq!((q, rem.is_exact_zero()), (lin.clone(), true));
        assert_eq!(lin.v_c(r(1, 1)).unwrap(), Some(r(1, 1)));
    }

    #[test]
    fn first_edge_of_product_example() {
        let f = k(3);
        let h = poly(&f, &["s^4", "th*s^2 + s^3", "th*s", "0", "s", "1"]);
        for side in [Side::Left, Side::Right] {
            let (fac, cof) = h.factor_first_edge(side, r(12, 1)).unwrap();
            assert_eq!(fac.degree(), Some(1));
            assert_eq!(fac.newton_polygon().unwrap().edges(), vec![Edge { length: 1, slope: r(-2, 1) }]);
            let prod = match side {
                Side::Left => fac.mul(&cof),
                Side::Right => cof.mul(&fac),
            };
            let c = r(2, 1);
            let bound = h.sub(&prod).v_c_lower_bound(c);
            assert!(bound.is_none_or(|b| b >= h.v_c(c).unwrap().unwrap() + 12));
        }
    }

    #[test]
    fn decomposition_of_product_example() {
        let f = k(3);
        let h = poly(&f, &["s^4", "th*s^2 + s^3", "th*s", "0", "s", "1"]);
        let factors = h.slope_decomposition(6).unwrap();
        let edges: Vec<Edge> = factors.iter().flat_map(|p| p.newton_polygon().unwrap().edges()).collect();
        assert_eq!(
            edges,
            vec![
                Edge { length: 1, slope: r(-2, 1) },
                Edge { length: 1, slope: r(-1, 1) },
                Edge { length: 3, slope: r(-1, 3) }
            ]
        );
    }

    #[test]
    fn single_edge_cases() {
        let f = k(3);
        let h = poly(&f, &["s", "1"]);
        assert_eq!(h.factor_first_edge(Side::Left, r(4, 1)), Err(Error::SingleEdge));
        assert_eq!(h.slope_decomposition(5).unwrap(), vec![h.clone()]);
        let (q, rem) = h.right_divide(&h, 4).unwrap();
        assert_eq!(q, SigmaTPoly::one(&f));
        assert!(rem.is_exact_zero());
    }

    #[test]
    fn ambiguous_coefficients() {
        let f = k(3);
        let h = SigmaTPoly::new(
            &f,
            vec![parse_laurent(&f, "s^-1").unwrap(), SkewLaurent::zero(&f).truncate(-2), SkewLaurent::one(&f)],
        );
        assert_eq!(h.newton_polygon(), Err(Error::AmbiguousValuation { index: 1 }));
        let h = SigmaTPoly::new(
            &f,
            vec![parse_laurent(&f, "s^-1").unwrap(), SkewLaurent::zero(&f).truncate(3), SkewLaurent::one(&f)],
        );
        assert_eq!(h.newton_polygon().unwrap().vertices(), &[(0, -1), (2, 0)]);
    }
}
