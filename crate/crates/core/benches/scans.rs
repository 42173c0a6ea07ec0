//! Sequential against data-parallel execution of the main verification scans.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use moufang::loopcore::{is_moufang, LoopTable, Scan};
use moufang::products::catalog;
use moufang::zorn::psl_loop;
use moufang::{Exec, Ring};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn moufang_table(c: &mut Criterion) {
    let m2 = psl_loop(&Ring::field(2).unwrap(), 120, Exec::Auto).unwrap();
    let mut group = c.benchmark_group("moufang-exhaustive-m2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &m2, |b, t: &LoopTable| {
            b.iter(|| is_moufang(t, Scan::exhaustive().with_exec(exec)))
        });
    }
    group.finish();
}

fn moufang_lazy(c: &mut Criterion) {
    let e = catalog("paige-semidirect", 2, 0, Exec::Auto).unwrap();
    let mut group = c.benchmark_group("moufang-sampled-paige-semidirect");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| is_moufang(&e, Scan::sampled(20_000, 1).with_exec(exec)))
        });
    }
    group.finish();
}

fn materialize(c: &mut Criterion) {
    let r = Ring::field(3).unwrap();
    let mut group = c.benchmark_group("materialize-psl-f3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| psl_loop(&r, 1080, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, moufang_table, moufang_lazy, materialize);
criterion_main!(benches);
