use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ilac_core::oracle::{self, AuditGrid};
use ilac_core::tradeoff::{self, Domain, PilotPolicy};
use ilac_core::{build_link_at_snr, SystemConfig};

fn frontier(c: &mut Criterion) {
    let cfg = SystemConfig {
        n_antennas: 32,
        ..SystemConfig::default()
    };
    let link = build_link_at_snr(&cfg, 20.0).unwrap();

    c.bench_function("sweep_time_continuous", |b| {
        b.iter(|| {
            tradeoff::sweep_frontier(
                Domain::Time,
                black_box(199),
                PilotPolicy::ContinuousOptimal,
                &link,
                &cfg,
            )
        })
    });
    c.bench_function("sweep_time_integer_pilot", |b| {
        b.iter(|| {
            tradeoff::sweep_frontier(
                Domain::Time,
                black_box(199),
                PilotPolicy::IntegerArgmax,
                &link,
                &cfg,
            )
        })
    });
    c.bench_function("sweep_frequency", |b| {
        b.iter(|| {
            tradeoff::sweep_frontier(
                Domain::Frequency,
                black_box(110),
                PilotPolicy::ContinuousOptimal,
                &link,
                &cfg,
            )
        })
    });
    c.bench_function("compare_frontiers", |b| {
        b.iter(|| tradeoff::compare_frontiers(black_box(100), &link, &cfg))
    });
}

fn audits(c: &mut Criterion) {
    let cfg = SystemConfig::default();
    let link = build_link_at_snr(&cfg, 20.0).unwrap();
    let grid = AuditGrid::default();

    c.bench_function("audit_inequality", |b| {
        b.iter(|| oracle::audit_log_lower_bound(black_box(&grid)))
    });
    c.bench_function("audit_suite", |b| {
        b.iter(|| oracle::run_suite(&link, &cfg, black_box(&grid)))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = frontier, audits
}
criterion_main!(benches);
