//! Benchmarks for the heavy paths: box products, cancellation, morphism
//! homology, and the involution solver.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hfbord_core::bimod::{box_da_d, box_da_da, da_reduce};
use hfbord_core::builtins::Builtins;
use hfbord_core::cfk;
use hfbord_core::config::Config;
use hfbord_core::involution::solve_involution;
use hfbord_core::translate::translate;
use hfbord_core::typed::{reduce, MorComplex};

fn bench_box_and_reduce(c: &mut Criterion) {
    let b = Builtins::shipped();
    let cfg = Config::default();
    let fig8 = translate(&cfk::figure8().0, 0, 0).unwrap().module;
    c.bench_function("box_da_d az x figure8", |bench| {
        bench.iter(|| black_box(box_da_d(&b.az, &fig8, &cfg).unwrap()))
    });
    let product = box_da_d(&b.az, &fig8, &cfg).unwrap();
    c.bench_function("reduce az x figure8", |bench| {
        bench.iter(|| black_box(reduce(&product).unwrap()))
    });
    c.bench_function("da_reduce conj_az x az", |bench| {
        let p = box_da_da(&b.conj_az, &b.az, &cfg).unwrap();
        bench.iter(|| black_box(da_reduce(&p).unwrap()))
    });
}

fn bench_mor_homology(c: &mut Criterion) {
    let fig8 = translate(&cfk::figure8().0, 0, 0).unwrap().module;
    c.bench_function("mor homology End(figure8)", |bench| {
        bench.iter(|| {
            let mor = MorComplex::new(&fig8, &fig8);
            black_box(mor.homology().unwrap().dim)
        })
    });
}

fn bench_solver(c: &mut Criterion) {
    let b = Builtins::shipped();
    let cfg = Config::default();
    let (kc, ki) = cfk::trefoil_lh();
    let tref = translate(&kc, -1, 0).unwrap().module;
    c.bench_function("solve_involution trefoil", |bench| {
        bench.iter(|| black_box(solve_involution(&b, &tref, &kc, &ki, &cfg).unwrap()))
    });
}

criterion_group!(benches, bench_box_and_reduce, bench_mor_homology, bench_solver);
criterion_main!(benches);
