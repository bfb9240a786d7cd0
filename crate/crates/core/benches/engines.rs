use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cyclic_shuffle::exact::{brute_force_distribution, evolve_distribution};
use cyclic_shuffle::limits::tv_lower_bound_with_grid;
use cyclic_shuffle::mc::{estimate_statistic, Statistic};
use cyclic_shuffle::par;
use cyclic_shuffle::ShuffleKind;

fn modes<T>(c: &mut Criterion, group: &str, f: impl Fn() -> T) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| black_box(f())));
    g.bench_function("sequential", |b| b.iter(|| par::sequential(|| black_box(f()))));
    g.finish();
}

fn engines(c: &mut Criterion) {
    modes(c, "brute_force_card_n7", || brute_force_distribution(ShuffleKind::CardCyclicTransposition, 7).unwrap());
    modes(c, "evolve_pos_n8", || evolve_distribution(ShuffleKind::PositionCyclicTransposition, 8).unwrap());
    modes(c, "mc_derangement_pos_n200", || {
        estimate_statistic(ShuffleKind::PositionCyclicTransposition, 200, Statistic::Derangement, 100_000, 1).unwrap()
    });
    modes(c, "tv_bound_grid_1001", || tv_lower_bound_with_grid(1001));
}

criterion_group!(benches, engines);
criterion_main!(benches);
