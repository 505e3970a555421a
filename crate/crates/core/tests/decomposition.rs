use num_rational::Ratio;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tmodule_core::random::{single_edge_monic, slope_for_length};
use tmodule_core::{Edge, PerfectField, Side, SigmaTPoly};

/// Two or three monic single-edge factors with distinct slopes, and their product.
fn factors(seed: u64, q: u64) -> (Vec<SigmaTPoly>, SigmaTPoly) {
    let f = PerfectField::rational(q).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let count = rng.gen_range(2..=3);
    let mut slopes = Vec::new();
    let mut out = Vec::new();
    while out.len() < count {
        let len = rng.gen_range(1..=2);
        let s = slope_for_length(&mut rng, len, 2);
        if slopes.contains(&s) {
            continue;
        }
        slopes.push(s);
        out.push(single_edge_monic(&mut rng, &f, len, s));
    }
    let h = out.iter().fold(SigmaTPoly::one(&f), |acc, x| acc.mul(x));
    (out, h)
}

fn edge_of(p: &SigmaTPoly) -> Vec<Edge> {
    p.newton_polygon().unwrap().edges()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn recovers_the_edge_multiset(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3]), precision in 2i64..8) {
        let (parts, h) = factors(seed, q);
        let got = h.slope_decomposition(precision).unwrap();
        let mut want: Vec<Edge> = parts.iter().flat_map(edge_of).collect();
        want.sort();
        let found: Vec<Edge> = got.iter().flat_map(edge_of).collect();
        prop_assert!(got.iter().all(|p| edge_of(p).len() == 1 && p.is_monic()));
        prop_assert!(found.windows(2).all(|w| w[0].slope < w[1].slope), "factors come in order of increasing slope");
        let mut sorted = found.clone();
        sorted.sort();
        prop_assert_eq!(sorted, want);
        let product = got.iter().fold(SigmaTPoly::one(h.field()), |acc, x| acc.mul(x));
        let residual = h.sub(&product);
        let bound = residual.v_c_lower_bound(Ratio::from_integer(0));
        prop_assert!(bound.is_none_or(|b| b >= Ratio::from_integer(precision)), "residual {:?} below {}", bound, precision);
    }

    #[test]
    fn first_edge_factor_on_both_sides(seed in any::<u64>(), gain in 1i64..6) {
        let (_, h) = factors(seed, 3);
        let np = h.newton_polygon().unwrap();
        let first = np.edges()[0];
        let c = -first.slope;
        let vch = h.v_c(c).unwrap().unwrap();
        let gain = Ratio::from_integer(gain);
        for side in [Side::Left, Side::Right] {
            let (f, g) = h.factor_first_edge(side, gain).unwrap();
            prop_assert_eq!(edge_of(&f), vec![first]);
            let product = match side {
                Side::Left => f.mul(&g),
                Side::Right => g.mul(&f),
            };
            let bound = h.sub(&product).v_c_lower_bound(c);
            prop_assert!(bound.is_none_or(|b| b >= vch + gain));
        }
    }
}
