//! Parallel-vs-sequential comparison for the data-parallel inner loops.
//!
//! With default features the `parallel` benches run on the rayon pool while
//! the `sequential` benches pin the fallback path, so one run compares both.
//! Building with `--no-default-features` makes the two coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use wva_core::design::{sweep_beta_velocity, sweep_beta_velocity_seq};
use wva_core::exec::{map_collect, map_collect_seq};
use wva_core::polarization::weak_value_closed_form;
use wva_core::sagnac::SagnacConfig;
use wva_core::spectrum::{fit_center, postselected_spectrum, ProbeSpec};

fn sweep_inputs() -> (SagnacConfig, ProbeSpec, Vec<f64>, Vec<f64>) {
    let sagnac = SagnacConfig::new(500.0, 840e-9).unwrap();
    let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
    let betas: Vec<f64> = (1..=64).map(|i| i as f64 * 2e-4).collect();
    let velocities: Vec<f64> = (1..=512).map(|i| i as f64 * 2e-12).collect();
    (sagnac, probe, betas, velocities)
}

fn bench_sweep(c: &mut Criterion) {
    let (sagnac, probe, betas, velocities) = sweep_inputs();
    let mut group = c.benchmark_group("sweep_beta_velocity");
    group.bench_function("parallel", |b| {
        b.iter(|| {
            sweep_beta_velocity(
                black_box(&sagnac),
                black_box(&probe),
                black_box(&betas),
                black_box(&velocities),
            )
            .unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            sweep_beta_velocity_seq(
                black_box(&sagnac),
                black_box(&probe),
                black_box(&betas),
                black_box(&velocities),
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_spectrum_pipeline(c: &mut Criterion) {
    let probe = ProbeSpec::new(840.0, 150.0, 1.0).unwrap();
    let grid = probe.grid(1 << 17, 4.0).unwrap();
    let wv = weak_value_closed_form(0.001, 2.5e-9).unwrap();
    let mut group = c.benchmark_group("postselect_and_fit_131072");
    // Synthesis + fit on the configured backend (parallel by default).
    group.bench_function("backend", |b| {
        b.iter(|| {
            let s = postselected_spectrum(black_box(&probe), &wv, &grid).unwrap();
            fit_center(&s).unwrap()
        })
    });
    group.finish();
}

fn bench_map_kernel(c: &mut Criterion) {
    // The raw fan-out primitive on a representative per-point kernel.
    let phis: Vec<f64> = (1..=200_000).map(|i| i as f64 * 1e-12).collect();
    let kernel = |phi: &f64| weak_value_closed_form(0.001, *phi).unwrap().im_a_w;
    let mut group = c.benchmark_group("map_weak_value_200k");
    group.bench_function("parallel", |b| {
        b.iter(|| map_collect(black_box(&phis), kernel))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| map_collect_seq(black_box(&phis), kernel))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_sweep,
    bench_spectrum_pipeline,
    bench_map_kernel
);
criterion_main!(benches);
