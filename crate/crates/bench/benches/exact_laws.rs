use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use steinops::bcp_indicators::{bound_cor42, bound_cor45, bound_thm44};
use steinops::distributions::{
    pmf_compound_explicit, pmf_compound_panjer, pmf_poisson_binomial, PanjerCounting, SeverityLaw,
};
use steinops::runs_model::{bound_cor48, exact_runs_law, RunsModel};
use steinops::stein_catalog::{catalog_cases, CatalogGrid};
use steinops_bench::{mixed_joint, two_level};

fn exact_laws(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_laws");
    for n in [64, 256, 1024] {
        let probs = two_level(n);
        g.bench_with_input(BenchmarkId::new("poisson_binomial", n), &probs, |b, p| {
            b.iter(|| pmf_poisson_binomial(black_box(p)).unwrap())
        });
        let model = RunsModel::new(n, 0.4).unwrap();
        g.bench_with_input(BenchmarkId::new("runs", n), &model, |b, m| {
            b.iter(|| exact_runs_law(black_box(m)))
        });
    }
    let sev = SeverityLaw::new(vec![0.0, 0.5, 0.3, 0.2]).unwrap();
    let counting = PanjerCounting::poisson(20.0).unwrap();
    g.bench_function("compound_panjer", |b| {
        b.iter(|| pmf_compound_panjer(black_box(&counting), &sev, 1e-12).unwrap())
    });
    let counts = counting.pmf(1e-12).unwrap();
    g.bench_function("compound_explicit", |b| {
        b.iter(|| pmf_compound_explicit(black_box(&counts), &sev, 1e-12).unwrap())
    });
    g.finish();
}

fn bounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("bounds");
    let probs = two_level(128);
    g.bench_function("cor42_n128", |b| {
        b.iter(|| bound_cor42(black_box(&probs)).unwrap())
    });
    g.bench_function("cor45_n128", |b| {
        b.iter(|| bound_cor45(black_box(&probs)).unwrap())
    });
    let joint = mixed_joint(8);
    g.bench_function("thm44_joint8", |b| {
        b.iter(|| bound_thm44(black_box(&joint)).unwrap())
    });
    let runs = RunsModel::new(200, 0.4).unwrap();
    g.bench_function("cor48_n200", |b| {
        b.iter(|| bound_cor48(black_box(&runs)).unwrap())
    });
    g.bench_function("catalog_default_grid", |b| {
        b.iter(|| catalog_cases(black_box(&CatalogGrid::default())).unwrap())
    });
    g.finish();
}

criterion_group!(benches, exact_laws, bounds);
criterion_main!(benches);
