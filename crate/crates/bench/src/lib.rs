//! Fixtures shared by the benchmarks.

use tmodule_core::expr::parse_tau;
use tmodule_core::{PerfectField, SigmaTPoly, SkewLaurent, TModule, TauMatrix};

pub fn module(q: u64, rows: &[&[&str]]) -> TModule {
    let f = PerfectField::rational(q).expect("valid q");
    let rows = rows.iter().map(|r| r.iter().map(|e| parse_tau(&f, e).expect("valid entry")).collect()).collect();
    TModule::new(TauMatrix::from_rows(rows).expect("square matrix"), None).expect("valid t-module")
}

pub fn drinfeld() -> TModule {
    module(3, &[&["th + tau + tau^2"]])
}

pub fn carlitz_cube() -> TModule {
    module(3, &[&["th", "1", "0"], &["0", "th", "1"], &["tau", "0", "th"]])
}

pub fn two_slopes() -> TModule {
    module(3, &[&["th + tau^2", "tau^3"], &["1 + tau", "th + tau^2"]])
}

pub fn extension() -> TModule {
    module(3, &[&["th + tau^2", "0"], &["tau", "th"]])
}

/// `θ + θ^{1/3}σ + σ² + θ²σ³`, a unit-free series with mixed levels.
pub fn series(f: &PerfectField) -> SkewLaurent {
    let th = f.theta().expect("theta");
    SkewLaurent::exact(f, [(0, th.clone()), (1, th.twist(-1)), (2, f.one()), (3, th.pow(2).expect("power"))])
}

/// A degree-4 polynomial in t with two Newton polygon edges.
pub fn polynomial(f: &PerfectField) -> SigmaTPoly {
    let th = f.theta().expect("theta");
    SigmaTPoly::new(
        f,
        vec![
            SkewLaurent::monomial(th.clone(), -4),
            SkewLaurent::monomial(f.one(), -1),
            SkewLaurent::exact(f, [(-1, f.one()), (2, th)]),
            SkewLaurent::monomial(f.from_int(2), 1),
            SkewLaurent::one(f),
        ],
    )
}
