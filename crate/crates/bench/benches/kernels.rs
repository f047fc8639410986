use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use igk_core::dombrowski::kahler_structure_at;
use igk_core::geometry::{christoffel_alpha, curvature_tensor, fisher_metric};
use igk_core::oscillator::{oscillator_expectation, OscillatorOperator};
use igk_core::projective::{cramer_rao_residual, spectral_decompose};
use igk_core::spin::{q_matrix, stern_gerlach_transition};
use igk_core::verify::{run_suite, Suite, VerifyOptions};
use igk_core::{
    CMatrix, ExponentialFamilySpec, PlaneKahlerFunction, PlanePoint, ProjectivePoint, SphereKahlerFunction,
    TangentBundlePoint, C64,
};

fn families(c: &mut Criterion) {
    let categorical = ExponentialFamilySpec::builtin("categorical:4").unwrap();
    let normal = ExponentialFamilySpec::normal();
    let theta_c = [0.3, -0.4, 0.1];
    let theta_n = [0.5, -0.8];
    c.bench_function("fisher_metric/categorical:4", |b| {
        b.iter(|| fisher_metric(&categorical, black_box(&theta_c)))
    });
    c.bench_function("fisher_metric/normal", |b| {
        b.iter(|| fisher_metric(&normal, black_box(&theta_n)))
    });
    c.bench_function("christoffel/normal", |b| {
        b.iter(|| christoffel_alpha(&normal, black_box(&theta_n), 0.5))
    });
    c.bench_function("curvature/categorical:4", |b| {
        b.iter(|| curvature_tensor(&categorical, black_box(&theta_c), -1.0))
    });
    c.bench_function("expectation_to_natural/normal", |b| {
        b.iter(|| normal.expectation_to_natural(black_box(&[0.5, 1.5])))
    });
    let point = TangentBundlePoint::new(&categorical, theta_c.to_vec(), vec![1.0, 0.5, -0.2]).unwrap();
    c.bench_function("kahler_structure/categorical:4", |b| {
        b.iter(|| kahler_structure_at(&categorical, black_box(&point)))
    });
}

fn projective(c: &mut Criterion) {
    let n = 6;
    let a = CMatrix::from_fn(n, n, |i, j| C64::new((i + j) as f64 * 0.1, i as f64 - j as f64));
    let obs = spectral_decompose(&a).unwrap();
    let z = ProjectivePoint::new(igk_core::CVector::from_fn(n, |i, _| C64::new(1.0 + i as f64, 0.5))).unwrap();
    c.bench_function("spectral_decompose/6", |b| b.iter(|| spectral_decompose(black_box(&a))));
    c.bench_function("cramer_rao_residual/6", |b| {
        b.iter(|| cramer_rao_residual(&obs, black_box(&z)))
    });
}

fn spin(c: &mut Criterion) {
    let f = SphereKahlerFunction::new(0.2, 0.6, -0.3, 0.9);
    let g = SphereKahlerFunction::new(0.0, -0.1, 1.0, 0.4);
    c.bench_function("q_matrix/10", |b| b.iter(|| q_matrix(10, black_box(f))));
    c.bench_function("stern_gerlach/10", |b| {
        b.iter(|| stern_gerlach_transition(10, f, 10, black_box(g)))
    });
}

fn oscillator(c: &mut Criterion) {
    let f = PlaneKahlerFunction::new(0.3, -1.2, 0.7, 1.5);
    let z = PlanePoint::new(0.8, -0.4);
    c.bench_function("oscillator_expectation", |b| {
        b.iter(|| oscillator_expectation(1.0, f, black_box(z)))
    });
    c.bench_function("oscillator_matrix/64", |b| {
        b.iter(|| OscillatorOperator::new(1.0, black_box(f), 64))
    });
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("all", |b| {
        b.iter(|| run_suite(Suite::All, black_box(&VerifyOptions::default())))
    });
    group.finish();
}

criterion_group!(benches, families, projective, spin, oscillator, suites);
criterion_main!(benches);
