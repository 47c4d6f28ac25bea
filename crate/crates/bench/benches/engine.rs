use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use monocount_core::census::{b_statistic, pyramid_counts, triangle_census};
use monocount_core::fourthmoment::{class_census, DEFAULT_BUDGET};
use monocount_core::graph::generate;
use monocount_core::sim::sample_values;
use monocount_core::{FamilySpec, SimConfig, StatisticChoice};

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("triangle_census");
    for n in [200usize, 800] {
        let g = generate(&FamilySpec::Gnp {
            n,
            p: 0.05,
            seed: 1,
        })
        .unwrap();
        group.bench_with_input(BenchmarkId::new("gnp_p0.05", n), &g, |b, g| {
            b.iter(|| triangle_census(black_box(g)))
        });
    }
    group.finish();

    let g = generate(&FamilySpec::Gnp {
        n: 300,
        p: 0.1,
        seed: 1,
    })
    .unwrap();
    let tc = triangle_census(&g);
    c.bench_function("b_statistic/gnp(300,0.1)", |b| {
        b.iter(|| b_statistic(&g, &tc))
    });
    c.bench_function("pyramid_counts/gnp(300,0.1)", |b| {
        b.iter(|| pyramid_counts(&tc))
    });
}

fn classes(c: &mut Criterion) {
    let mut group = c.benchmark_group("class_census");
    group.sample_size(10);
    for spec in [
        FamilySpec::Complete { n: 8 },
        FamilySpec::Composite { n: 8, c: 2 },
        FamilySpec::Gnp {
            n: 40,
            p: 0.2,
            seed: 1,
        },
    ] {
        let tc = triangle_census(&generate(&spec).unwrap());
        group.bench_function(format!("{spec:?}"), |b| {
            b.iter(|| class_census(black_box(&tc), DEFAULT_BUDGET).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_values");
    group.sample_size(10);
    for (name, spec, colors) in [
        ("pyramid(2000)", FamilySpec::Pyramid { n: 2000 }, 2),
        (
            "gnp(60,0.3)",
            FamilySpec::Gnp {
                n: 60,
                p: 0.3,
                seed: 1,
            },
            3,
        ),
    ] {
        let g = generate(&spec).unwrap();
        let tc = triangle_census(&g);
        let cfg = SimConfig {
            c: colors,
            replications: 2_000,
            seed: 1,
            statistic: StatisticChoice::Both,
        };
        group.bench_function(name, |b| b.iter(|| sample_values(&g, &tc, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, census, classes, sampling);
criterion_main!(benches);
