mod common;

use common::{
    build_series, certificate_holds, field, module, oracle_rank_mod, simple_element_recipe, simple_series_recipe,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tmodule_core::random::{tmodule, ModuleShape};
use tmodule_core::{
    analyze, check_condition_1, check_condition_2, check_condition_2prime, decide, diagonal_profile_mod, quick_check,
    rank_mod, AnalyzeOptions, PerfectField, Purity, SigmaMatrix, SigmaTPoly, SkewLaurent, Verdict,
};

type SeriesRecipe = Vec<(i64, common::ElementRecipe)>;

fn matrix(f: &PerfectField, entries: &[SeriesRecipe]) -> SigmaMatrix {
    SigmaMatrix::new(2, 2, entries.iter().map(|e| build_series(f, e)).collect()).unwrap()
}

/// A unit of K⟨⟨σ⟩⟩: a nonzero constant plus higher terms.
fn unit(f: &PerfectField, c: &common::ElementRecipe, tail: &SeriesRecipe) -> SkewLaurent {
    let c = common::build(f, c);
    let c = if c.is_zero() { f.one() } else { c };
    SkewLaurent::scalar(c).add(&build_series(f, tail).shift_left(1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn profile_is_invariant_under_units(
        b in prop::collection::vec(simple_series_recipe(0, 4, 2), 4),
        diag in prop::collection::vec((simple_element_recipe(), simple_series_recipe(0, 2, 1)), 4),
        off in prop::collection::vec(simple_series_recipe(0, 3, 2), 2),
        s in 1usize..6,
    ) {
        let f = field(3);
        let b = matrix(&f, &b);
        let z = SkewLaurent::zero(&f);
        // U lower triangular, V upper triangular, both with unit diagonals
        let u = SigmaMatrix::new(2, 2, vec![unit(&f, &diag[0].0, &diag[0].1), z.clone(), build_series(&f, &off[0]), unit(&f, &diag[1].0, &diag[1].1)]).unwrap();
        let v = SigmaMatrix::new(2, 2, vec![unit(&f, &diag[2].0, &diag[2].1), build_series(&f, &off[1]), z, unit(&f, &diag[3].0, &diag[3].1)]).unwrap();
        let ubv = u.mul(&b).unwrap().mul(&v).unwrap();
        let p = diagonal_profile_mod(&b, s).unwrap();
        let mut nu = p.nu.clone();
        nu.sort();
        let mut nu2 = diagonal_profile_mod(&ubv, s).unwrap().nu;
        nu2.sort();
        prop_assert_eq!(&nu, &nu2);
        prop_assert_eq!(p.rank() + p.at_least_s, 2);
        // the K-linear oracle sees the same exponents
        for k in 1..=s {
            prop_assert_eq!(nu.iter().filter(|&&x| x < k).count(), oracle_rank_mod(&b, k));
        }
    }

    #[test]
    fn rank_is_monotone_in_s(b in prop::collection::vec(simple_series_recipe(0, 5, 2), 4)) {
        let f = field(2);
        let b = matrix(&f, &b);
        let ranks: Vec<usize> = (0..7).map(|s| rank_mod(&b, s).unwrap()).collect();
        prop_assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
    }
}

fn random_modules(seed: u64, count: usize, d: Option<usize>) -> Vec<tmodule_core::TModule> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let shape = ModuleShape {
                q: [2, 3][rng.gen_range(0..2)],
                d: d.unwrap_or_else(|| rng.gen_range(1..=2)),
                max_deg_tau: 2,
                max_terms: 2,
            };
            tmodule(&mut rng, shape).unwrap()
        })
        .collect()
}

#[test]
fn slope_multiset_does_not_depend_on_pivot_order() {
    for m in random_modules(7, 12, Some(2)) {
        let base = decide(&m, &AnalyzeOptions::default()).unwrap();
        for seed in 0..10 {
            let r = decide(&m, &AnalyzeOptions { seed: Some(seed), ..Default::default() }).unwrap();
            assert_eq!(r.edge_multiset, base.edge_multiset, "seed {seed} on {}", m.phi_t());
            assert_eq!(r.verdict, base.verdict);
        }
    }
}

#[test]
fn dimension_one_matches_the_direct_polygon() {
    for m in random_modules(11, 20, Some(1)) {
        let f = m.field().clone();
        // t − φ_t(σ⁻¹), assembled without the elimination
        let a = m.phi_t().get(0, 0).to_sigma().neg();
        let direct = SigmaTPoly::new(&f, vec![a, SkewLaurent::one(&f)]);
        let edges: Vec<_> = direct.newton_polygon().unwrap().edges().iter().map(|e| e.to_json()).collect();
        let r = decide(&m, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.edge_multiset, edges, "{}", m.phi_t());
        // a one-dimensional module is a Drinfeld module exactly when τ occurs
        assert_eq!(r.abelian, m.deg_tau() >= 1, "{}", m.phi_t());
    }
}

#[test]
fn reports_are_coherent() {
    for m in random_modules(3, 30, None) {
        let a = analyze(&m, &AnalyzeOptions { n_max: Some(12), ..Default::default() }).unwrap();
        let r = &a.report;
        let label = m.phi_t().to_string();
        assert_eq!(r.abelian, r.t_finite, "{label}");
        assert_eq!(r.dimension, m.dim());
        let total: i64 = r.edge_multiset.iter().map(|e| e.length).sum();
        assert_eq!(total as usize, m.dim(), "edge lengths add up to the dimension for {label}");
        let positive = r.edge_multiset.iter().all(|e| !e.slope.starts_with('-') && e.slope != "0");
        assert_eq!(r.abelian, positive, "{label}");
        match r.verdict {
            Verdict::Abelian => {
                let cert = r.certificate.expect("abelian verdicts carry a certificate");
                assert!(certificate_holds(&m, &cert), "oracle rejects {cert:?} for {label}");
                assert_eq!(r.pure.is_pure(), r.edge_multiset.len() == 1);
                if r.edge_multiset.len() == 1 {
                    let s = &r.edge_multiset[0].slope;
                    let w = r.weight.as_deref().unwrap();
                    let back = tmodule_core::newton::parse_slope(w).unwrap();
                    assert_eq!(back, tmodule_core::newton::parse_slope(s).unwrap().recip());
                }
            }
            Verdict::NotAbelian => {
                assert_eq!(r.stable_under_doubling, Some(true), "{label}");
                assert!(r.certificate.is_none());
                assert_eq!(r.pure, Purity::NOT_APPLICABLE);
            }
            Verdict::AbelianUncertified => panic!("no certificate within n <= 12 for {label}"),
        }
        if quick_check(&m).unwrap().is_some() {
            assert!(r.abelian, "the quick check implies abelian for {label}");
        }
    }
}

#[test]
fn known_modules_have_checkable_certificates() {
    let cases = [
        module(3, &[&["th + tau + tau^2"]]),
        module(3, &[&["th", "1", "0"], &["0", "th", "1"], &["tau", "0", "th"]]),
        module(3, &[&["th + tau^2", "tau^3"], &["1 + tau", "th + tau^2"]]),
    ];
    for m in &cases {
        let r = decide(m, &AnalyzeOptions::default()).unwrap();
        let cert = r.certificate.expect("abelian");
        assert!(certificate_holds(m, &cert), "{cert:?}");
    }
}

#[test]
fn power_condition_implies_the_block_conditions() {
    let mut certified = 0;
    for m in random_modules(5, 40, None) {
        for n in 1..=4 {
            if check_condition_1(&m, n).unwrap().is_some() {
                certified += 1;
                assert!(check_condition_2(&m, n).unwrap().is_some(), "vertical blocks at n = {n} for {}", m.phi_t());
                assert!(
                    check_condition_2prime(&m, n).unwrap().is_some(),
                    "horizontal blocks at n = {n} for {}",
                    m.phi_t()
                );
            }
        }
    }
    assert!(certified > 0);
}
