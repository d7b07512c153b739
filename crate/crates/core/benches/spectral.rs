use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fwnoise::mc::{self, Experiment, McMode};
use fwnoise::simulate::{simulate, DgpSpec, Model};
use fwnoise::{s_statistics, with_threads, FunctionalSample, SpectralAnalysis};

fn sample(len: usize, grid: usize) -> FunctionalSample {
    simulate(&DgpSpec::new(Model::IidBm, grid, len, 1).unwrap()).unwrap()
}

/// Thread counts to compare: sequential and whatever the machine offers.
fn thread_settings() -> Vec<(String, Option<usize>)> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut v = vec![("1".to_string(), Some(1))];
    if all > 1 {
        v.push((all.to_string(), None));
    }
    v
}

fn bench_analysis(c: &mut Criterion) {
    let mut g = c.benchmark_group("analysis");
    for len in [256, 1024] {
        let x = sample(len, 100);
        for (name, threads) in thread_settings() {
            g.bench_with_input(
                BenchmarkId::new(format!("threads={name}"), len),
                &x,
                |b, x| {
                    b.iter(|| with_threads(threads, || SpectralAnalysis::new(x).unwrap()).unwrap())
                },
            );
        }
        g.bench_with_input(BenchmarkId::new("without_h1", len), &x, |b, x| {
            b.iter(|| SpectralAnalysis::without_h1(x).unwrap())
        });
    }
    g.finish();
}

fn bench_kernel_path(c: &mut Criterion) {
    let mut g = c.benchmark_group("distance");
    g.sample_size(10);
    let x = sample(256, 50);
    g.bench_function("kernel_path", |b| {
        b.iter(|| s_statistics(&x).unwrap().m_hat())
    });
    g.bench_function("fast_path", |b| {
        b.iter(|| fwnoise::m_hat_squared(&x).unwrap())
    });
    g.finish();
}

fn bench_mc(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc");
    g.sample_size(10);
    let e = Experiment::new(
        Model::IidBm,
        vec![256],
        vec![0.05],
        64,
        McMode::Classical,
        7,
    );
    for (name, threads) in thread_settings() {
        let e = e.clone().with_threads(threads);
        g.bench_function(format!("threads={name}"), |b| {
            b.iter(|| mc::run(&e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_analysis, bench_kernel_path, bench_mc);
criterion_main!(benches);
