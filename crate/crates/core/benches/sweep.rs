use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dustlink::config::RunConfig;
use dustlink::sweep::{run_attenuation_sweep, run_attenuation_sweep_sequential, run_failure_frontier};

fn sweep_benchmark(c: &mut Criterion) {
    let mut group = c.benchmark_group("attenuation_sweep");
    for steps in [100usize, 2_000, 20_000] {
        let json = format!(r#"{{"sweep": {{"steps": {steps}}}, "humidity": [0, 20, 40, 60, 80, 100]}}"#);
        let run = RunConfig::from_json(&json).unwrap().resolve().unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", steps), &run, |b, run| {
            b.iter(|| run_attenuation_sweep_sequential(black_box(run)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new(if dustlink::par::is_parallel() { "parallel" } else { "fallback" }, steps), &run, |b, run| {
            b.iter(|| run_attenuation_sweep(black_box(run)).unwrap())
        });
    }
    group.finish();
}

fn frontier_benchmark(c: &mut Criterion) {
    let run = RunConfig::from_json(r#"{"storm": {"size_unit_scale": 1000}}"#)
        .unwrap()
        .resolve()
        .unwrap();
    let visibilities: Vec<f64> = (0..64).map(|i| 1e-3 * 10f64.powf(i as f64 / 16.0)).collect();
    c.bench_function("failure_frontier_12_cells_64_visibilities", |b| {
        b.iter(|| run_failure_frontier(black_box(&run), black_box(&visibilities)).unwrap())
    });
}

criterion_group!(benches, sweep_benchmark, frontier_benchmark);
criterion_main!(benches);
