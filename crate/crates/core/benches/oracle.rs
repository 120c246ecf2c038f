use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tropdesc::enumerate::{evaluate_by_types, evaluate_direct_with, random_general_config, OracleOptions};
use tropdesc::family::reachable_family;
use tropdesc::par::Execution;
use tropdesc::parse_invariant;
use tropdesc::sweep::equivalence_sweep;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn direct(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_direct");
    for expr in ["<tau_1(1) tau_1(2)^2>_2", "<tau_0(2)^5>_2"] {
        let inv = parse_invariant(expr).unwrap();
        let config = random_general_config(1, &inv).unwrap();
        for (name, execution) in MODES {
            let opts = OracleOptions { execution, ..OracleOptions::default() };
            group.bench_with_input(BenchmarkId::new(name, expr), &inv, |b, inv| {
                b.iter(|| evaluate_direct_with(inv, &config, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn by_types(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_by_types");
    group.sample_size(10);
    let inv = parse_invariant("<tau_1(1) tau_1(2)^2>_2").unwrap();
    let config = random_general_config(1, &inv).unwrap();
    for (name, execution) in MODES {
        let opts = OracleOptions { execution, ..OracleOptions::default() };
        group.bench_function(name, |b| b.iter(|| evaluate_by_types(&inv, &config, &opts).unwrap()));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("equivalence_sweep");
    group.sample_size(10);
    let fam = reachable_family(1, 5);
    for (name, execution) in MODES {
        group.bench_function(name, |b| b.iter(|| equivalence_sweep(&fam, &[1], execution)));
    }
    group.finish();
}

criterion_group!(benches, direct, by_types, sweep);
criterion_main!(benches);
