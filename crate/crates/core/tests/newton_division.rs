mod common;

use common::{brute_unit_slopes, brute_vertices, build_poly, build_series, field, poly_recipe, simple_series_recipe};
use num_rational::Ratio;
use proptest::prelude::*;
use tmodule_core::newton::merge_edges;
use tmodule_core::{NewtonPolygon, SigmaTPoly, SkewLaurent};

fn unit_slopes(p: &NewtonPolygon) -> Vec<Ratio<i64>> {
    let mut out: Vec<_> = p.edges().iter().flat_map(|e| std::iter::repeat_n(e.slope, e.length as usize)).collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hull_matches_brute_force(xs in prop::collection::btree_map(0i64..12, -8i64..8, 1..10)) {
        let points: Vec<(i64, i64)> = xs.into_iter().collect();
        let np = NewtonPolygon::from_points(&points);
        prop_assert_eq!(np.vertices().to_vec(), brute_vertices(&points));
        prop_assert_eq!(unit_slopes(&np), brute_unit_slopes(&points));
        let slopes = np.slopes();
        prop_assert!(slopes.windows(2).all(|w| w[0] < w[1]), "slopes increase strictly");
    }

    #[test]
    fn product_law(a in poly_recipe(0, 4, -3, 3, 2), b in poly_recipe(0, 4, -3, 3, 2)) {
        let f = field(3);
        let (a, b) = (build_poly(&f, &a), build_poly(&f, &b));
        let (na, nb) = (a.newton_polygon().unwrap(), b.newton_polygon().unwrap());
        for p in [b.mul(&a), a.mul(&b)] {
            let np = p.newton_polygon().unwrap();
            prop_assert_eq!(np.edges(), merge_edges(na.edges().into_iter().chain(nb.edges())));
            // independent oracle: the hull of the product points has the union of unit slopes
            let mut want = [brute_unit_slopes(&a.known_points()), brute_unit_slopes(&b.known_points())].concat();
            want.sort();
            prop_assert_eq!(brute_unit_slopes(&p.known_points()), want);
        }
    }

    #[test]
    fn exact_division_contracts(
        h in poly_recipe(2, 5, -3, 3, 2),
        g in poly_recipe(1, 2, -3, 3, 2),
        shift in 0i64..4,
    ) {
        let f = field(3);
        let (h, g) = (build_poly(&f, &h), build_poly(&f, &g));
        let d = g.degree().unwrap();
        let v_lead = g.leading_coeff().unwrap().valuation().known().unwrap();
        // the largest c at which the leading term attains v_c, and smaller values
        let c_max = g.known_points().iter().filter(|p| (p.0 as usize) < d)
            .map(|&(i, v)| Ratio::new(v - v_lead, d as i64 - i))
            .min()
            .unwrap_or(Ratio::from_integer(0));
        let c = c_max - Ratio::new(shift, 2);
        prop_assert_eq!(g.v_c(c).unwrap(), Some(Ratio::from_integer(v_lead) + c * d as i64));
        for side in ["right", "left"] {
            let (q, r) = if side == "right" { h.right_divide(&g, 16).unwrap() } else { h.left_divide(&g, 16).unwrap() };
            let back = if side == "right" { q.mul(&g).add(&r) } else { g.mul(&q).add(&r) };
            prop_assert!(h.sub(&back).is_exact_zero(), "{side} reconstruction");
            prop_assert!(r.degree().is_none_or(|k| k < d));
            let (vh, vg) = (h.v_c(c).unwrap().unwrap(), g.v_c(c).unwrap().unwrap());
            if let Some(vr) = r.v_c(c).unwrap() {
                prop_assert!(vr >= vh, "{side}: v_c(r) = {vr} < v_c(h) = {vh}");
            }
            if let Some(vq) = q.v_c(c).unwrap() {
                prop_assert!(vq >= vh - vg, "{side}: v_c(q) = {vq} < {}", vh - vg);
            }
        }
    }

    #[test]
    fn truncated_division_reconstructs(
        h in poly_recipe(2, 4, -2, 3, 2),
        low in poly_recipe(0, 1, 0, 3, 2),
        tail in simple_series_recipe(1, 4, 2),
        rel in 6i64..14,
    ) {
        let f = field(3);
        let h = build_poly(&f, &h);
        let low = build_poly(&f, &low);
        // leading coefficient is a unit series, inverted only to precision `rel`
        let lead = SkewLaurent::one(&f).add(&build_series(&f, &tail));
        let mut coeffs = low.coeffs().to_vec();
        coeffs.push(lead);
        let g = SigmaTPoly::new(&f, coeffs);
        let (q, r) = h.right_divide(&g, rel).unwrap();
        prop_assert!(h.sub(&q.mul(&g).add(&r)).is_zero_to_precision());
        let (q, r) = h.left_divide(&g, rel).unwrap();
        prop_assert!(h.sub(&g.mul(&q).add(&r)).is_zero_to_precision());
        prop_assert!(r.degree().is_none_or(|k| k < g.degree().unwrap()));
    }
}
