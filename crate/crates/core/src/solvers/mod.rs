//! Exact and heuristic minimisers.

use serde_json::{json, Value};
use thiserror::Error;

use crate::kernels::{KernelError, PartialPermutation};
use crate::model::{ModelError, Rational};

pub mod brute;
pub mod exact;
mod graph;
pub mod oracle;
pub mod sa;
pub mod verify;

pub use brute::{brute_force, brute_force_capped, BruteForce, DEFAULT_VAR_CAP, MINIMIZER_CAP};
pub use exact::{exact_minimum, ExactMinimum};
pub use oracle::{permutation_oracle, OracleResult, ORACLE_LIMIT};
pub use sa::{simulated_annealing, SaParams, Temperature};
pub use verify::{verify_kernel, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("{num_vars} exceeds the limit of {cap}")]
    TooLarge { num_vars: usize, cap: usize },
    #[error("coefficients too large for 64-bit energy accumulation")]
    Overflow,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One assignment with its exact energy and, for encoded problems, what it decodes to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Vec<i8>,
    pub energy: Rational,
    pub feasible: bool,
    pub permutation: Option<PartialPermutation>,
    /// Objective value of the decoded placement, when known.
    pub objective: Option<i64>,
    pub solver: String,
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
}

impl Solution {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "energy": {"num": *self.energy.numer(), "den": *self.energy.denom()},
            "assignment": self.assignment,
            "feasible": self.feasible,
            "permutation": self.permutation.as_ref().map(|p| p.values().to_vec()),
            "solver": self.solver,
            "seed": self.seed,
        });
        if let Some(s) = self.sweeps {
            v["sweeps"] = json!(s);
        }
        if let Some(o) = self.objective {
            v["objective"] = json!(o);
        }
        v
    }
}
