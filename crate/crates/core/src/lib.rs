//! Exact QUBO and Ising models for permutation problems.
//!
//! The crate builds integer-coefficient kernels whose minimizers are exactly the
//! encodings of permutations or partial permutations, composes them with the
//! particle placement problem (and the problems that reduce to it), and ships
//! exact and heuristic solvers to check the results.

pub mod builder;
pub mod encodings;
pub mod io;
pub mod kernels;
pub mod layout;
pub mod model;
pub mod ppp;
pub mod reductions;
pub mod solvers;
pub mod stats;

pub use builder::{ExpressionBuilder, LinearForm};
pub use encodings::{build_vector_model, decode_vector, encode_vector, EncodingError, Scheme, VectorValue};
pub use io::{export, import, EncodingMeta, Format, FormatError, ModelFile};
pub use kernels::{
    build_kernel, decode_permutation, encode_permutation, Decoded, InfeasibleReason, KernelError, KernelHandle, KernelSpec,
    PartialPermutation, Technique,
};
pub use layout::{Cell, Label, MatrixId, VariableLayout};
pub use model::{Conversion, Coupling, Kind, ModelError, QuadraticModel, Rational};
pub use stats::{stats, Diameter, ModelStats};
pub use ppp::{
    compose, compose_with_target, decode_solution, default_lambda, default_lambda_for, density, ppp_value, quartet_count,
    term_counts, EncodedProblem, Lambda, ObjectiveTarget, PppError, PppInstance, TermCounts,
};
pub use reductions::{
    bipartite_matching_to_ppp, matching_to_ppp, qap_to_ppp, subgraph_iso_to_ppp, tsp_graph_to_ppp, tsp_to_ppp, BipartiteGraph, Big,
    Problem, ReductionError, WeightedGraph,
};
pub use solvers::{
    brute_force, exact_minimum, permutation_oracle, simulated_annealing, verify_kernel, BruteForce, OracleResult, SaParams,
    Solution, SolverError, Temperature, VerifyReport,
};
