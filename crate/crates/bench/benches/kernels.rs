use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tmodule_bench::{carlitz_cube, drinfeld, extension, polynomial, series, two_slopes};
use tmodule_core::{decide, diagonalize_sigma_t, AnalyzeOptions, DiagonalizeOptions, PerfectField, SigmaTMatrix};

fn field_arithmetic(c: &mut Criterion) {
    let f = PerfectField::rational(3).unwrap();
    let th = f.theta().unwrap();
    let a = &th.twist(-2) + &f.one();
    let b = (&th + &f.from_int(2)).inv().unwrap();
    c.bench_function("field multiply", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("field twist", |bench| bench.iter(|| black_box(&b).twist(-3)));
}

fn series_arithmetic(c: &mut Criterion) {
    let f = PerfectField::rational(3).unwrap();
    let x = series(&f);
    c.bench_function("series inverse to precision 16", |bench| bench.iter(|| black_box(&x).invert(16).unwrap()));
    let p = polynomial(&f);
    c.bench_function("polynomial product", |bench| bench.iter(|| black_box(&p).mul(black_box(&p))));
    c.bench_function("slope decomposition", |bench| bench.iter(|| black_box(&p).slope_decomposition(8).unwrap()));
}

fn elimination(c: &mut Criterion) {
    for (name, m) in [("carlitz cube", carlitz_cube()), ("two slopes", two_slopes())] {
        let opts = DiagonalizeOptions::for_module(m.field(), m.dim(), m.deg_tau());
        let matrix = SigmaTMatrix::characteristic(m.phi_t());
        c.bench_function(&format!("diagonalize {name}"), |bench| {
            bench.iter(|| diagonalize_sigma_t(black_box(&matrix), &opts).unwrap())
        });
    }
}

fn decision(c: &mut Criterion) {
    let opts = AnalyzeOptions::default();
    for (name, m) in [("drinfeld", drinfeld()), ("two slopes", two_slopes()), ("extension", extension())] {
        c.bench_function(&format!("decide {name}"), |bench| bench.iter(|| decide(black_box(&m), &opts).unwrap()));
    }
}

criterion_group!(benches, field_arithmetic, series_arithmetic, elimination, decision);
criterion_main!(benches);
