//! Randomized consistency checks exposed as `tmodule selftest`.

use std::process::ExitCode;

use anyhow::Result;
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tmodule_core::newton::merge_edges;
use tmodule_core::random::{self, ModuleShape};
use tmodule_core::{decide, AnalyzeOptions, PerfectField, SigmaTPoly, Verdict};

struct Tally {
    name: &'static str,
    passed: usize,
    failed: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, passed: 0, failed: Vec::new() }
    }

    fn record(&mut self, ok: Result<bool>, what: impl FnOnce() -> String) {
        match ok {
            Ok(true) => self.passed += 1,
            Ok(false) => self.failed.push(what()),
            Err(e) => self.failed.push(format!("{}: {e}", what())),
        }
    }
}

fn product_law(rng: &mut StdRng, f: &PerfectField) -> (SigmaTPoly, SigmaTPoly, Result<bool>) {
    let (da, db) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
    let a = random::sigma_t_poly(rng, f, da, -3, 3, 2);
    let b = random::sigma_t_poly(rng, f, db, -3, 3, 2);
    let check = || -> Result<bool> {
        let expected = merge_edges(a.newton_polygon()?.edges().into_iter().chain(b.newton_polygon()?.edges()));
        Ok(b.mul(&a).newton_polygon()?.edges() == expected)
    };
    let ok = check();
    (a, b, ok)
}

fn division(rng: &mut StdRng, f: &PerfectField) -> Result<bool> {
    let (dh, dg) = (rng.gen_range(2..=5), rng.gen_range(1..=2));
    let h = random::sigma_t_poly(rng, f, dh, -3, 3, 2);
    let g = random::sigma_t_poly(rng, f, dg, -3, 3, 2);
    let (q, r) = h.right_divide(&g, 16)?;
    let right = h.sub(&q.mul(&g).add(&r)).is_zero_to_precision();
    let (q, r) = h.left_divide(&g, 16)?;
    let left = h.sub(&g.mul(&q).add(&r)).is_zero_to_precision();
    Ok(right && left && r.degree().is_none_or(|d| d < g.degree().unwrap_or(0)))
}

fn decomposition(rng: &mut StdRng, f: &PerfectField) -> Result<bool> {
    let count = rng.gen_range(2..=3);
    let mut slopes: Vec<Ratio<i64>> = Vec::new();
    let mut factors = Vec::new();
    while factors.len() < count {
        let len = rng.gen_range(1..=2);
        let s = random::slope_for_length(rng, len, 2);
        if slopes.contains(&s) {
            continue;
        }
        slopes.push(s);
        factors.push(random::single_edge_monic(rng, f, len, s));
    }
    let h = factors.iter().fold(SigmaTPoly::one(f), |acc, x| acc.mul(x));
    let parts = h.slope_decomposition(4)?;
    let mut got: Vec<_> = parts.iter().map(|p| p.newton_polygon().map(|n| n.edges())).collect::<Result<Vec<_>, _>>()?;
    let mut want: Vec<_> =
        factors.iter().map(|p| p.newton_polygon().map(|n| n.edges())).collect::<Result<Vec<_>, _>>()?;
    got.sort();
    want.sort();
    Ok(got == want)
}

fn module_verdict(rng: &mut StdRng) -> (String, Result<bool>) {
    let shape = ModuleShape { q: [2, 3][rng.gen_range(0..2)], d: rng.gen_range(1..=2), max_deg_tau: 2, max_terms: 2 };
    let m = match random::tmodule(rng, shape) {
        Ok(m) => m,
        Err(e) => return ("module".into(), Err(e.into())),
    };
    let label = m.phi_t().to_string();
    let opts = AnalyzeOptions { n_max: Some(12), ..Default::default() };
    let ok = decide(&m, &opts).map_err(Into::into).map(|r| match r.verdict {
        Verdict::Abelian => r.certificate.is_some() && r.abelian == r.t_finite,
        Verdict::AbelianUncertified => false,
        Verdict::NotAbelian => r.stable_under_doubling == Some(true) && r.certificate.is_none(),
    });
    (label, ok)
}

pub fn run(seed: u64, count: usize) -> Result<ExitCode> {
    let mut rng = StdRng::seed_from_u64(seed);
    let field = PerfectField::rational(3)?;
    let mut tallies = vec![
        Tally::new("newton polygon product law"),
        Tally::new("division with remainder"),
        Tally::new("slope decomposition"),
        Tally::new("verdict against certificates"),
    ];
    for i in 0..count {
        let (a, b, ok) = product_law(&mut rng, &field);
        tallies[0].record(ok, || format!("#{i}: f = {a}, g = {b}"));
        tallies[1].record(division(&mut rng, &field), || format!("#{i}"));
        tallies[2].record(decomposition(&mut rng, &field), || format!("#{i}"));
        let (label, ok) = module_verdict(&mut rng);
        tallies[3].record(ok, || format!("#{i}: phi_t = {label}"));
    }
    let mut failed = false;
    for t in &tallies {
        let status = if t.failed.is_empty() { "ok" } else { "FAILED" };
        println!("{:<32}{}/{} {status}", t.name, t.passed, t.passed + t.failed.len());
        for f in &t.failed {
            println!("    {f}");
        }
        failed |= !t.failed.is_empty();
    }
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}
