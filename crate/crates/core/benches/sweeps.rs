use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use quaddom::families::{family_limit_report, solve_family1, solve_many, FamilyKind};
use quaddom::numerics::ToleranceSpec;
use quaddom::quadrature::{verify_quadrature_identity, derive_distribution, TestFunction};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    vec![
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()),
    ]
}

fn family_sweep(c: &mut Criterion) {
    let params: Vec<f64> = (1..=16).map(|i| 0.05 * i as f64).collect();
    let mut group = c.benchmark_group("ray_family_sweep");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| solve_many(FamilyKind::RayFamily, &params)))
        });
    }
    group.finish();
}

fn limit_report(c: &mut Criterion) {
    let params = [0.5, 0.7, 0.9, 0.99];
    let mut group = c.benchmark_group("conchoid_limit_report");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| family_limit_report(FamilyKind::Conchoid, &params, 512).unwrap()))
        });
    }
    group.finish();
}

fn verification(c: &mut Criterion) {
    let spec = solve_family1(1.0).unwrap().spec;
    let tol = ToleranceSpec::new(1e-13, 1e-10, 4000).unwrap();
    let dist = derive_distribution(&spec, &tol).unwrap();
    let fs: Vec<TestFunction> = (0..32)
        .map(|i| TestFunction::new(Complex64::new(-4.0 + 0.25 * i as f64, 3.0), 3 + (i % 3) as u32).unwrap())
        .collect();
    let mut group = c.benchmark_group("verify_32_test_functions");
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| verify_quadrature_identity(&spec, &dist, &fs, 1e-7, &tol).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, family_sweep, limit_report, verification);
criterion_main!(benches);
