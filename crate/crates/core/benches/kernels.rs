use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use irm_core::problems::{gen_laplacian3d, random_vector};
use irm_core::stability::{linspace, disturbance_sweep};

fn spmv(c: &mut Criterion) {
    let mut group = c.benchmark_group("spmv");
    for g in [16usize, 32, 48] {
        let a = gen_laplacian3d(g).unwrap();
        let v = random_vector(a.n(), 1);
        group.bench_with_input(BenchmarkId::new("serial", a.n()), &v, |bch, v| bch.iter(|| a.spmv_serial(black_box(v))));
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", a.n()), &v, |bch, v| {
            bch.iter(|| a.spmv_parallel(black_box(v)))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let deltas = linspace(-1e-2, 1e-2, 401);
    let kappas = linspace(1.0, 1e4, 64);
    c.bench_function("sweep_64x401", |bch| bch.iter(|| disturbance_sweep(black_box(&kappas), black_box(&deltas)).unwrap()));
}

criterion_group!(benches, spmv, sweep);
criterion_main!(benches);
