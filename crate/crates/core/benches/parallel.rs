//! Parallel against sequential on the three hot loops: the all-pairs
//! d_{S,Λ} table, the ω audit and dense integer matrix products.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use transfer_core::actions::ActionMetric;
use transfer_core::fixtures::actions::dihedral_square;
use transfer_core::fixtures::rng;
use transfer_core::p2::{all_pair_nodes, omega_audit};
use transfer_core::par::Mode;
use transfer_core::rational::qi;
use transfer_core::Matrix;

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn metric_table(c: &mut Criterion) {
    let a = dihedral_square(&[0, 1, 3]);
    let m = ActionMetric::new(&a, qi(2), 6).unwrap();
    let mut group = c.benchmark_group("ds_lambda_table");
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| m.table(mode).unwrap()));
    }
    group.finish();
}

fn omega(c: &mut Criterion) {
    let a = dihedral_square(&[0, 1, 3]);
    let nodes = all_pair_nodes(&a.group.elements().unwrap(), a.npoints());
    let samples: Vec<_> = nodes.iter().take(16).flat_map(|z| nodes.iter().map(move |w| (z.clone(), w.clone()))).collect();
    let mut group = c.benchmark_group("omega_audit");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| omega_audit(&a, qi(1), 4, &samples, mode).unwrap()));
    }
    group.finish();
}

fn matmul(c: &mut Criterion) {
    let mut r = rng(7);
    let mut group = c.benchmark_group("matrix_mul");
    for n in [64usize, 160] {
        let mut random = || Matrix::from_dense(&(0..n).map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect()).collect::<Vec<_>>());
        let (x, y) = (random(), random());
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| x.mul_with(&y, mode)));
        }
    }
    group.finish();
}

criterion_group!(benches, metric_table, omega, matmul);
criterion_main!(benches);
