use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use deblur_core::{
    blur, generate_image, lw_deblur, make_circulant_matrix, make_kernel_5bin, rl_deblur,
    rl_regularized, svd, tsvd_deblur, Generator, LwParams, RlParams, SolverConfig,
};
use std::hint::black_box;

fn bench_svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for n in [12usize, 24, 32] {
        let t = make_circulant_matrix(&make_kernel_5bin(), n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| svd(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let t = make_circulant_matrix(&make_kernel_5bin(), 12).unwrap();
    let f = generate_image(
        &Generator::Delta {
            index: 5,
            height: 1.0,
        },
        12,
    )
    .unwrap();
    let g = blur(&t, &f).unwrap();
    let low = generate_image(
        &Generator::BackgroundPlusDelta {
            background: 0.75,
            index: 5,
            bump: 0.25,
        },
        12,
    )
    .unwrap();
    let g_low = blur(&t, &low).unwrap();
    let s = svd(&t).unwrap();
    let cfg = SolverConfig::default().without_trace();
    let fixed = SolverConfig::default()
        .with_max_iters(1000)
        .with_conv_tol(0.0)
        .without_trace();

    c.bench_function("rl_delta_to_convergence", |b| {
        b.iter(|| rl_deblur(black_box(&g), &t, &cfg).unwrap())
    });
    c.bench_function("rl_regularized_1000_iters", |b| {
        let params = RlParams::new(1e-4).unwrap();
        b.iter(|| rl_regularized(black_box(&g_low), &t, params, &fixed).unwrap())
    });
    c.bench_function("lw_delta_to_convergence", |b| {
        let params = LwParams::default().with_sigma_max(s.sigma_max());
        b.iter(|| lw_deblur(black_box(&g), &t, params, &cfg).unwrap())
    });
    c.bench_function("tsvd_m6", |b| {
        b.iter(|| tsvd_deblur(black_box(&g), &s, 6).unwrap())
    });
}

criterion_group!(benches, bench_svd, bench_solvers);
criterion_main!(benches);
