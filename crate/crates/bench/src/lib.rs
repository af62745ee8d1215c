//! Shared fixtures for the benchmarks.

use permqubo::reductions::{random_qap, random_tsp};
use permqubo::{compose, qap_to_ppp, tsp_to_ppp, EncodedProblem, Kind, Lambda, PppInstance, QuadraticModel, Technique};

pub fn tsp(n: usize, seed: u64) -> PppInstance {
    tsp_to_ppp(&random_tsp(n, seed)).expect("valid distances")
}

pub fn qap(n: usize, seed: u64) -> PppInstance {
    let (f, d) = random_qap(n, seed);
    qap_to_ppp(&f, &d).expect("valid matrices")
}

/// A TSP instance composed with `technique` in QUBO form.
pub fn composed_tsp(n: usize, technique: Technique) -> EncodedProblem {
    compose(&tsp(n, 1), technique, Kind::Qubo, Lambda::Auto).expect("composable")
}

pub fn kernel_model(technique: Technique, n: usize, kind: Kind) -> QuadraticModel {
    permqubo::build_kernel(technique, n, n, kind).expect("valid kernel").model
}
