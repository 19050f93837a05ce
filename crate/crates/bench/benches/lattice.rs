use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use clocklat::clock::{build_flip_graph, clocked_state, counterclocked_state, height, orient_clock, Convention};
use clocklat::decompose::{peel_decompose, symdiff_decompose};
use clocklat::generators::load_fixture;
use clocklat::matchings::{enumerate_matchings, DEFAULT_CAP};
use clocklat_bench::grid_workloads;

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for ((m, n), b) in grid_workloads() {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{m}x{n}")), &b, |bench, b| {
            bench.iter(|| enumerate_matchings(b, DEFAULT_CAP).unwrap().len())
        });
    }
    group.finish();
}

fn lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("flip_graph_and_height");
    group.sample_size(10);
    for ((m, n), b) in grid_workloads() {
        let ms = enumerate_matchings(&b, DEFAULT_CAP).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{m}x{n}")), &ms, |bench, ms| {
            bench.iter(|| {
                let cd = orient_clock(build_flip_graph(&b, ms), Convention::Counterclockwise).unwrap();
                height(&cd).height
            })
        });
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    let mut inputs: Vec<_> = grid_workloads().into_iter().map(|((m, n), b)| (format!("{m}x{n}"), b)).collect();
    inputs.push(("k11n157".into(), load_fixture("k11n157").unwrap().balanced().unwrap()));
    for (label, b) in inputs {
        group.bench_with_input(BenchmarkId::new("symdiff", &label), &b, |bench, b| {
            bench.iter(|| {
                let (z, o) = (clocked_state(b).unwrap(), counterclocked_state(b).unwrap());
                symdiff_decompose(b, &z, &o).unwrap().num_cycles()
            })
        });
        group.bench_with_input(BenchmarkId::new("peel", &label), &b, |bench, b| {
            bench.iter(|| peel_decompose(b).unwrap().num_cycles())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, lattice, decomposition);
criterion_main!(benches);
