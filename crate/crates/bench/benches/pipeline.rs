use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use percentile_impact::inference::{chi_square_independence, kruskal_wallis};
use percentile_impact::percentile::assign_corpus;
use percentile_impact::regression::{build_design, fit_logit_clustered, FitOptions};
use percentile_impact::report::{class_distributions, run};
use percentile_impact::{regression_subset, ClassScheme, PercentileScheme, ReportConfig};
use percentile_impact_bench::{citations_only, synthetic};

fn percentiles(c: &mut Criterion) {
    let corpus = citations_only(&synthetic().corpus);
    c.bench_function("assign_corpus/5k", |b| {
        b.iter(|| assign_corpus(black_box(&corpus), PercentileScheme::IncitesGe).unwrap())
    });
}

fn tests(c: &mut Criterion) {
    let corpus = synthetic().corpus;
    let groups: Vec<Vec<f64>> = corpus.groups().iter().map(|g| corpus.group_percentiles(g)).collect();
    let slices: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
    c.bench_function("kruskal_wallis/5k", |b| b.iter(|| kruskal_wallis(black_box(&slices), 0.001).unwrap()));

    let table: Vec<Vec<f64>> = class_distributions(&corpus, &ClassScheme::pr6())
        .unwrap()
        .into_iter()
        .map(|d| d.counts.into_iter().map(|c| c as f64).collect())
        .collect();
    c.bench_function("chi_square/4x6", |b| b.iter(|| chi_square_independence(black_box(&table), 0.001).unwrap()));
}

fn regression(c: &mut Criterion) {
    let (subset, _) = regression_subset(&synthetic().corpus);
    let design = build_design(&subset, None).unwrap();
    c.bench_function("logit_clustered/4.4k", |b| {
        b.iter(|| fit_logit_clustered(black_box(&design), FitOptions::default()).unwrap())
    });
}

fn report(c: &mut Criterion) {
    let loaded = synthetic();
    let config = ReportConfig::default();
    let mut g = c.benchmark_group("report");
    g.sample_size(20);
    g.bench_function("synthetic", |b| b.iter(|| run(black_box(&loaded), &config).unwrap()));
    g.finish();
}

criterion_group!(benches, percentiles, tests, regression, report);
criterion_main!(benches);
