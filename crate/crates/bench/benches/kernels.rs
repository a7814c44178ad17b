use cosupp_bench::{snf_fixture, two_term, z12, z2_over_z4, z4};
use cosupp_core::dercat::{ext_modules, homology, Complex};
use cosupp_core::finmod::{hom_module, ring_module};
use cosupp_core::linalg::smith;
use cosupp_core::supports::{support_set_all_routes, SupportKind};
use cosupp_core::verify::{generate_finite_instance, run_suite, GenProfile, SuiteConfig};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn bench_smith(c: &mut Criterion) {
    let m = snf_fixture();
    c.bench_function("smith_12x12", |b| b.iter(|| smith(black_box(&m))));
}

fn bench_hom_module(c: &mut Criterion) {
    let r = z12();
    let rm = ring_module(&r);
    c.bench_function("hom_module_ring_ring", |b| {
        b.iter(|| hom_module(black_box(&rm), black_box(&rm)).expect("hom"))
    });
}

fn bench_homology(c: &mut Criterion) {
    let r = z4();
    let complex = two_term(&r);
    c.bench_function("homology_two_term", |b| b.iter(|| homology(black_box(&complex))));
}

fn bench_ext_window(c: &mut Criterion) {
    let r = z4();
    let m = z2_over_z4(&r);
    c.bench_function("ext_window_len_6", |b| {
        b.iter(|| ext_modules(black_box(&m), black_box(&m), 6).expect("window"))
    });
}

fn bench_all_routes(c: &mut Criterion) {
    let r = z4();
    let complex = two_term(&r);
    c.bench_function("cosupp_all_routes", |b| {
        b.iter(|| {
            support_set_all_routes(black_box(&complex), SupportKind::SmallCosupp, false)
                .expect("routes agree")
        })
    });
    let zero = Complex::zero(&r);
    c.bench_function("cosupp_all_routes_zero", |b| {
        b.iter(|| {
            support_set_all_routes(black_box(&zero), SupportKind::SmallCosupp, false)
                .expect("routes agree")
        })
    });
}

fn bench_instance_generation(c: &mut Criterion) {
    let profile = GenProfile::default();
    let mut seed = 0u64;
    c.bench_function("generate_instance", |b| {
        b.iter(|| {
            seed = seed.wrapping_add(1);
            generate_finite_instance(black_box(seed), &profile)
        })
    });
}

fn bench_suite_slice(c: &mut Criterion) {
    let config = SuiteConfig {
        properties: vec!["P-ThmA".into()],
        seed_start: 0,
        seed_end: 3,
        jobs: 1,
        validate: false,
        profile: GenProfile::default(),
    };
    c.bench_function("suite_thma_three_seeds", |b| b.iter(|| run_suite(black_box(&config))));
}

criterion_group!(
    benches,
    bench_smith,
    bench_hom_module,
    bench_homology,
    bench_ext_window,
    bench_all_routes,
    bench_instance_generation,
    bench_suite_slice
);
criterion_main!(benches);
