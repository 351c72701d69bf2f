use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wicknls::diagnostics::stochastic_bound_report;
use wicknls::noise_field::{grid_lattice_halfwidth, sample_noise};
use wicknls::parallel::map_indexed_seq;

const SEEDS: usize = 8;
const GRID: usize = 64;
const EPS: [f64; 2] = [0.25, 0.125];
const P: [f64; 1] = [4.0];

// one seed of the stochastic bounds study
fn one_seed(seed: usize) -> f64 {
    let k = grid_lattice_halfwidth(GRID) as i64;
    let noise = sample_noise(seed as u64, k).unwrap();
    let report = stochastic_bound_report(&noise, &EPS, &P, GRID, true).unwrap();
    report.rows.len() as f64
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounds_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(map_indexed_seq(SEEDS, one_seed))));
    #[cfg(feature = "parallel")]
    group.bench_function("rayon", |b| {
        b.iter(|| black_box(wicknls::parallel::map_indexed_par(SEEDS, one_seed)))
    });
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
