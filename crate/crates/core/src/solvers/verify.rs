//! Exhaustive check that a kernel's minimizers are exactly the permutation encodings.

use std::collections::HashSet;
use std::fmt;

use super::brute::{brute_force, DEFAULT_VAR_CAP};
use super::SolverError;
use crate::kernels::{compare, kernel_closed_form};
use crate::kernels::{KernelSpec, PartialPermutation, Technique};
use crate::model::{Kind, Rational};
use crate::stats::ModelStats;

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub technique: Technique,
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    pub minimum: Rational,
    pub optimal: Rational,
    pub minimizer_count: u64,
    /// Minimizers that decode to a valid (partial) permutation.
    pub decoded: u64,
    /// Permutations whose canonical encoding is a minimizer.
    pub covered: u64,
    pub permutations: u64,
    pub stats: ModelStats,
    /// Cells differing from the published closed forms; `None` when no closed form applies.
    pub table_mismatches: Option<Vec<&'static str>>,
}

impl VerifyReport {
    pub fn decode_rate(&self) -> f64 {
        if self.minimizer_count == 0 {
            return 0.0;
        }
        self.decoded as f64 / self.minimizer_count as f64
    }

    /// Minimum is the claimed optimum, every minimizer decodes and every permutation is a minimizer.
    pub fn passed(&self) -> bool {
        self.minimum == self.optimal && self.decoded == self.minimizer_count && self.covered == self.permutations
    }
}

fn decimal(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    format!("{}", *r.numer() as f64 / *r.denom() as f64)
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "minimum {}, minimizers {}, decode {}%, covered {}/{}, optimal {}",
            decimal(&self.minimum),
            self.minimizer_count,
            (self.decode_rate() * 100.0).floor(),
            self.covered,
            self.permutations,
            decimal(&self.optimal),
        )?;
        match &self.table_mismatches {
            None => write!(f, ", table n/a"),
            Some(v) if v.is_empty() => write!(f, ", table ok"),
            Some(v) => write!(f, ", table differs in {}", v.join(",")),
        }
    }
}

pub fn verify_kernel(technique: Technique, m: usize, n: usize, kind: Kind) -> Result<VerifyReport, SolverError> {
    let spec = KernelSpec::new(technique, m, n, kind)?;
    let handle = spec.build()?;
    let bf = brute_force(&handle.model, DEFAULT_VAR_CAP)?;
    let decoded = bf.minimizers.iter().filter(|a| spec.decode(a).is_feasible()).count() as u64;
    let minimizers: HashSet<&Vec<i8>> = bf.minimizers.iter().collect();
    let mut covered = 0;
    let mut permutations = 0;
    for p in PartialPermutation::all(m, n) {
        permutations += 1;
        if minimizers.contains(&spec.encode(&p)?) {
            covered += 1;
        }
    }
    let stats = ModelStats::of(&handle.model);
    let table_mismatches = kernel_closed_form(technique, kind, m, n).map(|p| compare(&stats, &p));
    Ok(VerifyReport {
        technique,
        kind,
        m,
        n,
        minimum: bf.minimum,
        optimal: handle.optimal_value,
        minimizer_count: bf.minimizer_count,
        // Minimizers beyond the collection cap are not decoded.
        decoded: if bf.truncated { 0 } else { decoded },
        covered,
        permutations,
        stats,
        table_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_ising_3() {
        let r = verify_kernel(Technique::OneHot, 3, 3, Kind::Ising).unwrap();
        assert!(r.to_string().starts_with("minimum 0, minimizers 6, decode 100%"), "{r}");
        assert!(r.passed());
    }

    #[test]
    fn dual_matrix_ising_3() {
        let r = verify_kernel(Technique::DualMatrix, 3, 3, Kind::Ising).unwrap();
        assert_eq!(r.minimum, Rational::from_integer(12));
        assert_eq!((r.covered, r.permutations), (6, 6));
        assert!(r.passed());
    }

    #[test]
    fn partial_kernels() {
        let r = verify_kernel(Technique::OneHot, 2, 3, Kind::Qubo).unwrap();
        assert_eq!((r.minimum, r.minimizer_count), (Rational::from_integer(0), 6));
        let r = verify_kernel(Technique::Extended, 2, 3, Kind::Qubo).unwrap();
        assert_eq!(r.minimum, Rational::new(5, 2));
        assert!(r.to_string().starts_with("minimum 2.5,"));
        assert!(r.passed());
    }
}
