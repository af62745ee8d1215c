//! Exhaustive search over placements, independent of any QUBO encoding.

use rayon::prelude::*;

use super::SolverError;
use crate::kernels::PartialPermutation;
use crate::ppp::PppInstance;

/// Largest number of injections the oracle will enumerate.
pub const ORACLE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Minimum placement value, shift not included.
    pub best: i64,
    /// Lexicographically first minimizer.
    pub argmin: PartialPermutation,
    pub count: u64,
}

struct Search {
    m: usize,
    n: usize,
    pot: Vec<i64>,
    /// For placement `(ip, jp)`: interactions with earlier placements `(i, j)`, `i < ip`.
    earlier: Vec<Vec<(usize, usize, i64)>>,
}

#[derive(Clone)]
struct Best {
    value: i64,
    argmin: Vec<usize>,
    count: u64,
}

impl Search {
    fn gain(&self, vals: &[usize], i: usize, j: usize) -> i64 {
        let k = i * self.n + j;
        self.pot[k] + self.earlier[k].iter().filter(|&&(a, b, _)| vals[a] == b).map(|t| t.2).sum::<i64>()
    }

    fn dfs(&self, vals: &mut Vec<usize>, used: &mut [bool], acc: i64, best: &mut Option<Best>) {
        let i = vals.len();
        if i == self.m {
            match best {
                Some(b) if acc > b.value => {}
                Some(b) if acc == b.value => b.count += 1,
                _ => *best = Some(Best { value: acc, argmin: vals.clone(), count: 1 }),
            }
            return;
        }
        for j in 0..self.n {
            if used[j] {
                continue;
            }
            let g = self.gain(vals, i, j);
            used[j] = true;
            vals.push(j);
            self.dfs(vals, used, acc + g, best);
            vals.pop();
            used[j] = false;
        }
    }
}

/// Best placement value, its lexicographically first argmin and the number of argmins.
pub fn permutation_oracle(inst: &PppInstance) -> Result<OracleResult, SolverError> {
    let (m, n) = (inst.m(), inst.n());
    if PartialPermutation::count(m, n) > ORACLE_LIMIT {
        return Err(SolverError::TooLarge { num_vars: n, cap: ORACLE_LIMIT as usize });
    }
    let mut pot = vec![0i64; m * n];
    for (&(i, j), &w) in inst.potentials() {
        pot[i as usize * n + j as usize] = w;
    }
    let mut earlier = vec![Vec::new(); m * n];
    for (&(i, j, ip, jp), &w) in inst.interactions() {
        earlier[ip as usize * n + jp as usize].push((i as usize, j as usize, w));
    }
    let s = Search { m, n, pot, earlier };

    // Split on the first particle's position; merging in position order keeps
    // the lexicographic tie-break.
    let parts: Vec<Option<Best>> = (0..n)
        .into_par_iter()
        .map(|j0| {
            let mut vals = vec![j0];
            let mut used = vec![false; n];
            used[j0] = true;
            let mut best = None;
            s.dfs(&mut vals, &mut used, s.gain(&[], 0, j0), &mut best);
            best
        })
        .collect();
    let mut out: Option<Best> = None;
    for b in parts.into_iter().flatten() {
        match &mut out {
            Some(o) if b.value > o.value => {}
            Some(o) if b.value == o.value => o.count += b.count,
            _ => out = Some(b),
        }
    }
    let b = out.expect("m <= n gives at least one injection");
    Ok(OracleResult { best: b.value, argmin: PartialPermutation::new(b.argmin, n)?, count: b.count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppp::ppp_value;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_particles() {
        let mut inst = PppInstance::new(2, 2).unwrap();
        inst.add_potential(0, 1, 1).unwrap();
        inst.add_potential(1, 0, 2).unwrap();
        inst.add_interaction(0, 1, 1, 0, -3).unwrap();
        inst.add_interaction(0, 0, 1, 1, 5).unwrap();
        let r = permutation_oracle(&inst).unwrap();
        assert_eq!((r.best, r.argmin.values(), r.count), (0, &[1, 0][..], 1));
    }

    #[test]
    fn empty_instance_ties_everywhere() {
        let r = permutation_oracle(&PppInstance::new(2, 3).unwrap()).unwrap();
        assert_eq!((r.best, r.count), (0, 6));
        assert_eq!(r.argmin.values(), [0, 1]);
    }

    #[test]
    fn guard() {
        assert!(matches!(permutation_oracle(&PppInstance::new(11, 11).unwrap()), Err(SolverError::TooLarge { .. })));
    }

    #[test]
    fn matches_plain_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for &(m, n) in &[(1, 1), (2, 4), (3, 3), (3, 5), (5, 5)] {
            let mut inst = PppInstance::new(m, n).unwrap();
            for i in 0..m {
                for j in 0..n {
                    inst.add_potential(i, j, rng.gen_range(-3..=3)).unwrap();
                    for ip in i + 1..m {
                        for jp in 0..n {
                            if jp != j {
                                inst.add_interaction(i, j, ip, jp, rng.gen_range(-2..=2)).unwrap();
                            }
                        }
                    }
                }
            }
            let values: Vec<(i64, PartialPermutation)> =
                PartialPermutation::all(m, n).map(|p| (ppp_value(&inst, &p).unwrap(), p)).collect();
            let best = values.iter().map(|v| v.0).min().unwrap();
            let first = values.iter().find(|v| v.0 == best).unwrap();
            let r = permutation_oracle(&inst).unwrap();
            assert_eq!(r.best, best);
            assert_eq!(r.argmin, first.1);
            assert_eq!(r.count, values.iter().filter(|v| v.0 == best).count() as u64);
        }
    }
}
