use crate::model::{Kind, QuadraticModel};

use super::SolverError;

/// Adjacency in compressed rows, with linear terms. Used for local-field updates:
/// `field[v] = h[v] + sum_u J[v][u] * value[u]`, and flipping `v` changes the
/// energy by `(new - old) * field[v]`.
pub(crate) struct Csr {
    pub start: Vec<usize>,
    pub nbr: Vec<u32>,
    pub w: Vec<i64>,
    pub h: Vec<i64>,
    pub hot: i64,
    pub cold: i64,
}

impl Csr {
    pub fn new(model: &QuadraticModel) -> Result<Self, SolverError> {
        let n = model.num_vars();
        // Every reachable energy and field is bounded by the sum of |coefficients|.
        let bound = model
            .linear()
            .iter()
            .map(|t| t.1.unsigned_abs() as u128)
            .chain(model.quadratic().iter().map(|c| c.weight.unsigned_abs() as u128))
            .sum::<u128>();
        if bound > (i64::MAX / 4) as u128 {
            return Err(SolverError::Overflow);
        }
        let mut start = vec![0usize; n + 1];
        for c in model.quadratic() {
            start[c.i as usize + 1] += 1;
            start[c.j as usize + 1] += 1;
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let len = 2 * model.quadratic().len();
        let mut nbr = vec![0u32; len];
        let mut w = vec![0i64; len];
        for c in model.quadratic() {
            let (i, j) = (c.i as usize, c.j as usize);
            nbr[fill[i]] = c.j;
            w[fill[i]] = c.weight;
            fill[i] += 1;
            nbr[fill[j]] = c.i;
            w[fill[j]] = c.weight;
            fill[j] += 1;
        }
        let mut h = vec![0i64; n];
        for &(v, c) in model.linear() {
            h[v as usize] = c;
        }
        let kind = model.kind();
        Ok(Csr { start, nbr, w, h, hot: kind.hot() as i64, cold: kind.cold() as i64 })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        (self.start[v]..self.start[v + 1]).map(move |k| (self.nbr[k] as usize, self.w[k]))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.start[v + 1] - self.start[v]
    }

    pub fn fields(&self, vals: &[i64]) -> Vec<i64> {
        (0..self.len()).map(|v| self.h[v] + self.neighbours(v).map(|(u, w)| w * vals[u]).sum::<i64>()).collect()
    }

    /// Energy without the offset.
    pub fn energy(&self, vals: &[i64]) -> i64 {
        let mut e = 0;
        for v in 0..self.len() {
            e += self.h[v] * vals[v];
            for (u, w) in self.neighbours(v) {
                if u > v {
                    e += w * vals[v] * vals[u];
                }
            }
        }
        e
    }

    /// Flips `v`, updating neighbour fields; returns the energy change.
    #[inline]
    pub fn flip(&self, v: usize, vals: &mut [i64], fields: &mut [i64]) -> i64 {
        let old = vals[v];
        let new = if old == self.hot { self.cold } else { self.hot };
        let delta = new - old;
        vals[v] = new;
        for k in self.start[v]..self.start[v + 1] {
            fields[self.nbr[k] as usize] += self.w[k] * delta;
        }
        delta * fields[v]
    }
}

pub(crate) fn to_assignment(vals: &[i64]) -> Vec<i8> {
    vals.iter().map(|&v| v as i8).collect()
}

pub(crate) fn values_from_mask(mask: u64, n: usize, kind: Kind) -> Vec<i8> {
    (0..n).map(|v| if mask >> v & 1 == 1 { kind.hot() } else { kind.cold() }).collect()
}
