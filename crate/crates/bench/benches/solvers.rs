use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use permqubo::solvers::DEFAULT_VAR_CAP;
use permqubo::{brute_force, exact_minimum, permutation_oracle, simulated_annealing, Kind, SaParams, Technique};
use permqubo_bench::{composed_tsp, kernel_model, tsp};

fn brute(c: &mut Criterion) {
    let model = composed_tsp(4, Technique::OneHot).model;
    c.bench_function("brute_force/one-hot tsp4 (16 vars)", |b| b.iter(|| brute_force(black_box(&model), DEFAULT_VAR_CAP).unwrap()));
    let model = kernel_model(Technique::DualMatrix, 4, Kind::Qubo);
    let mut g = c.benchmark_group("brute_force_slow");
    g.sample_size(10);
    g.bench_function("dual-matrix kernel 4 (24 vars)", |b| b.iter(|| brute_force(black_box(&model), DEFAULT_VAR_CAP).unwrap()));
    g.finish();
}

fn exact(c: &mut Criterion) {
    let model = composed_tsp(5, Technique::DualMatrix).model;
    let mut g = c.benchmark_group("exact_minimum");
    g.sample_size(10);
    g.bench_function("dual-matrix tsp5 (40 vars)", |b| b.iter(|| exact_minimum(black_box(&model)).unwrap()));
    g.finish();
}

fn annealing(c: &mut Criterion) {
    let model = kernel_model(Technique::DualMatrix, 6, Kind::Qubo);
    let params = SaParams { sweeps: 500, ..SaParams::default() };
    c.bench_function("sa/dual-matrix 6, 500 sweeps", |b| b.iter(|| simulated_annealing(black_box(&model), &params).unwrap()));
    let model = composed_tsp(10, Technique::Extended).model;
    c.bench_function("sa/extended tsp10, 500 sweeps", |b| b.iter(|| simulated_annealing(black_box(&model), &params).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let inst = tsp(8, 2);
    c.bench_function("oracle/tsp8", |b| b.iter(|| permutation_oracle(black_box(&inst)).unwrap()));
}

criterion_group!(benches, brute, exact, annealing, oracle);
criterion_main!(benches);
