//! Exhaustive search in Gray-code order with incremental energies.

use rayon::prelude::*;

use super::graph::{values_from_mask, Csr};
use super::SolverError;
use crate::model::{QuadraticModel, Rational};

pub const DEFAULT_VAR_CAP: usize = 26;
pub const MINIMIZER_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub minimum: Rational,
    /// Minimizers in lexicographic order, at most [`MINIMIZER_CAP`] of them.
    pub minimizers: Vec<Vec<i8>>,
    /// Total number of minimizers, including any not collected.
    pub minimizer_count: u64,
    pub truncated: bool,
}

struct Chunk {
    best: i64,
    count: u64,
    masks: Vec<u64>,
}

/// Exact minimum and every minimizing assignment.
pub fn brute_force(model: &QuadraticModel, cap: usize) -> Result<BruteForce, SolverError> {
    brute_force_capped(model, cap, MINIMIZER_CAP)
}

pub fn brute_force_capped(model: &QuadraticModel, cap: usize, keep: usize) -> Result<BruteForce, SolverError> {
    let n = model.num_vars();
    if n > cap || n > 40 {
        return Err(SolverError::TooLarge { num_vars: n, cap: cap.min(40) });
    }
    let csr = Csr::new(model)?;
    // The top `high` variables pick a chunk; the rest run through a Gray code.
    let high = n.saturating_sub(12).min(4);
    let low = n - high;
    let chunks: Vec<Chunk> = (0..1u64 << high).into_par_iter().map(|c| run_chunk(&csr, c, low, high, keep)).collect();

    let best = chunks.iter().map(|c| c.best).min().expect("at least one chunk");
    let mut count = 0;
    let mut masks = Vec::new();
    for c in chunks.into_iter().filter(|c| c.best == best) {
        count += c.count;
        masks.extend(c.masks);
    }
    // Lexicographic order on assignments puts variable 0 first.
    masks.sort_unstable_by_key(|&m| if n == 0 { 0 } else { m.reverse_bits() >> (64 - n) });
    masks.truncate(keep);
    let kind = model.kind();
    let minimizers: Vec<Vec<i8>> = masks.iter().map(|&m| values_from_mask(m, n, kind)).collect();
    Ok(BruteForce {
        minimum: Rational::from_integer(best) + model.offset(),
        truncated: (minimizers.len() as u64) < count,
        minimizers,
        minimizer_count: count,
    })
}

fn run_chunk(csr: &Csr, chunk: u64, low: usize, high: usize, keep: usize) -> Chunk {
    let n = low + high;
    let mut mask = chunk << low;
    let mut vals: Vec<i64> = (0..n).map(|v| if mask >> v & 1 == 1 { csr.hot } else { csr.cold }).collect();
    let mut fields = csr.fields(&vals);
    let mut e = csr.energy(&vals);
    let mut out = Chunk { best: e, count: 1, masks: vec![mask] };
    for k in 1u64..1 << low {
        let v = k.trailing_zeros() as usize;
        e += csr.flip(v, &mut vals, &mut fields);
        mask ^= 1 << v;
        if e < out.best {
            out.best = e;
            out.count = 1;
            out.masks.clear();
            out.masks.push(mask);
        } else if e == out.best {
            out.count += 1;
            if out.masks.len() < keep {
                out.masks.push(mask);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{build_vector_model, Scheme};
    use crate::kernels::{build_kernel, Technique};
    use crate::model::Kind;
    use rand::{Rng, SeedableRng};

    #[test]
    fn one_hot_vector_k3() {
        let (m, _) = build_vector_model(Scheme::OneHot, 3, Kind::Qubo).unwrap();
        let r = brute_force(&m, DEFAULT_VAR_CAP).unwrap();
        assert_eq!(r.minimum, Rational::from_integer(0));
        assert_eq!(r.minimizers, [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn dual_matrix_n3() {
        let h = build_kernel(Technique::DualMatrix, 3, 3, Kind::Qubo).unwrap();
        let r = brute_force(&h.model, DEFAULT_VAR_CAP).unwrap();
        assert_eq!(r.minimum, Rational::from_integer(3));
        assert_eq!(r.minimizer_count, 6);
    }

    #[test]
    fn empty_model_has_one_empty_minimizer() {
        let m = QuadraticModel::empty(Kind::Ising, 0);
        let r = brute_force(&m, DEFAULT_VAR_CAP).unwrap();
        assert_eq!(r.minimum, Rational::from_integer(0));
        assert_eq!(r.minimizers, [Vec::<i8>::new()]);
    }

    #[test]
    fn too_large_is_an_error() {
        let m = QuadraticModel::empty(Kind::Qubo, 30);
        assert_eq!(brute_force(&m, DEFAULT_VAR_CAP).unwrap_err(), SolverError::TooLarge { num_vars: 30, cap: 26 });
    }

    #[test]
    fn cap_truncates_but_counts_everything() {
        let m = QuadraticModel::empty(Kind::Qubo, 14);
        let r = brute_force_capped(&m, 20, 10).unwrap();
        assert_eq!(r.minimizer_count, 1 << 14);
        assert_eq!(r.minimizers.len(), 10);
        assert!(r.truncated);
        assert_eq!(r.minimizers[0], vec![0; 14]);
        assert_eq!(r.minimizers[1], [vec![0; 13], vec![1]].concat());
    }

    #[test]
    fn matches_naive_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for kind in [Kind::Qubo, Kind::Ising] {
            for n in [1usize, 5, 9, 14] {
                let lin: Vec<(usize, i64)> = (0..n).map(|v| (v, rng.gen_range(-3..=3))).collect();
                let mut quad = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.gen_bool(0.4) {
                            quad.push((i, j, rng.gen_range(-3..=3)));
                        }
                    }
                }
                let m = QuadraticModel::from_terms(kind, n, lin, quad, Rational::new(1, 2)).unwrap();
                let r = brute_force(&m, DEFAULT_VAR_CAP).unwrap();
                let mut best = None;
                let mut all = Vec::new();
                for mask in 0u64..1 << n {
                    let a = values_from_mask(mask, n, kind);
                    let e = m.evaluate(&a).unwrap();
                    match best {
                        Some(b) if e > b => {}
                        Some(b) if e == b => all.push(a),
                        _ => {
                            best = Some(e);
                            all = vec![a];
                        }
                    }
                }
                all.sort();
                assert_eq!(Some(r.minimum), best);
                assert_eq!(r.minimizers, all);
            }
        }
    }
}
