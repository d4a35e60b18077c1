use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use libration::oracles::scan_occupations;
use libration::squeezing::{angle_traces, OracleConfig, SqueezeParams};
use libration::steadystate::{linspace, sweep_diagram, MeanFieldParams};
use libration::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn diagram(c: &mut Criterion) {
    let base = MeanFieldParams::new(-60.0, 0.0, 2.0, 1.0).unwrap();
    let grid = linspace(0.0, 300.0, 20_000);
    let mut g = c.benchmark_group("sweep_diagram_20k");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_diagram(black_box(&base), black_box(&grid), exec).unwrap())
        });
    }
    g.finish();
}

fn root_scan(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sets: Vec<MeanFieldParams> = (0..64)
        .map(|_| {
            MeanFieldParams::new(
                rng.gen_range(-100.0..20.0),
                rng.gen_range(0.0..200.0),
                rng.gen_range(0.1..5.0),
                rng.gen_range(0.1..2.0),
            )
            .unwrap()
        })
        .collect();
    let mut g = c.benchmark_group("root_scan_64x100k");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(&sets, |p| scan_occupations(p, 100_000)))
        });
    }
    g.finish();
}

fn squeeze_angles(c: &mut Criterion) {
    let p = SqueezeParams::from_rates(1.5, 1.0, 0.0, 0.0).unwrap();
    let angles = linspace(0.0, std::f64::consts::PI, 32);
    let times = linspace(0.0, 20.0, 400);
    let cfg = OracleConfig::default();
    let mut g = c.benchmark_group("squeeze_angle_traces_32");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| angle_traces(&p, &angles, &times, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, diagram, root_scan, squeeze_angles);
criterion_main!(benches);
