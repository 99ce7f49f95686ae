use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gvturan::conditions::{sweep_with, ConditionKind};
use gvturan::oracle::{build_graph, greedy_clique_with};
use gvturan::search::{run_search_with, SearchConfig, Strategy};
use gvturan::{Code, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn seven() -> Code {
    Code::from_strs(2, &["001", "010", "011", "100", "101", "110", "111"]).unwrap()
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    let mut exhaustive = SearchConfig::new(2, 3, Strategy::Exhaustive);
    exhaustive.z_grid_size = 64;
    let mut random = SearchConfig::new(3, 2, Strategy::Random);
    random.z_grid_size = 64;
    random.budget = 200;
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("exhaustive_q2_m3", name), &exec, |b, &exec| {
            b.iter(|| run_search_with(&exhaustive, exec, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("random_q3_m2", name), &exec, |b, &exec| {
            b.iter(|| run_search_with(&random, exec, None).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let code = seven();
    let mut group = c.benchmark_group("lemma8_sweep");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("grid256", name), &exec, |b, &exec| {
            b.iter(|| sweep_with(&code, ConditionKind::Lemma8, 256, true, exec).unwrap())
        });
    }
    group.finish();
}

fn clique(c: &mut Criterion) {
    let g = build_graph(&seven(), 3, 4).unwrap();
    let mut group = c.benchmark_group("greedy_clique");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("seven_cubed", name), &exec, |b, &exec| {
            b.iter(|| greedy_clique_with(&g, 64, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, search, sweep, clique);
criterion_main!(benches);
