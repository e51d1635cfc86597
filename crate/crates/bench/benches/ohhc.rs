use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ohhc_core::partition::{generate, split};
use ohhc_core::simulator::{run_parallel_sort, GatherPlan, SimOptions};
use ohhc_core::{quicksort, Distribution, DistributionSpec, GroupMode, OhhcConfig, OhhcTopology};

const N: usize = 1 << 18;

fn input(dist: Distribution) -> Vec<i64> {
    generate(&DistributionSpec::new(dist, N, 42)).expect("valid spec")
}

fn bench_quicksort(c: &mut Criterion) {
    let mut group = c.benchmark_group("quicksort");
    group.throughput(Throughput::Elements(N as u64));
    for dist in Distribution::ALL {
        let data = input(dist);
        group.bench_with_input(BenchmarkId::from_parameter(dist), &data, |b, data| {
            b.iter_batched_ref(
                || data.clone(),
                |v| black_box(quicksort(v)),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn bench_split(c: &mut Criterion) {
    let data = input(Distribution::Random);
    let mut group = c.benchmark_group("split");
    group.throughput(Throughput::Elements(N as u64));
    for d in 1..=4 {
        let nodes = OhhcConfig::new(d, GroupMode::Full).unwrap().node_count();
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, &nodes| {
            b.iter(|| black_box(split(&data, nodes).unwrap()))
        });
    }
    group.finish();
}

fn bench_topology(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for d in 1..=4 {
        let config = OhhcConfig::new(d, GroupMode::Full).unwrap();
        group.bench_with_input(BenchmarkId::new("topology+plan", d), &config, |b, &cfg| {
            b.iter(|| {
                let t = OhhcTopology::build(cfg).unwrap();
                black_box(GatherPlan::build(&t).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_parallel_run(c: &mut Criterion) {
    let data = input(Distribution::Random);
    let mut group = c.benchmark_group("parallel_sort");
    group.sample_size(20);
    group.throughput(Throughput::Elements(N as u64));
    for mode in GroupMode::ALL {
        for d in 1..=4 {
            let topo = OhhcTopology::build(OhhcConfig::new(d, mode).unwrap()).unwrap();
            group.bench_with_input(BenchmarkId::new(mode.as_str(), d), &topo, |b, topo| {
                b.iter(|| black_box(run_parallel_sort(topo, &data, SimOptions::default()).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_quicksort,
    bench_split,
    bench_topology,
    bench_parallel_run
);
criterion_main!(benches);
