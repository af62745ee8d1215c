//! Term counts, coefficient sets and interaction-graph diameter.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::model::{QuadraticModel, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diameter {
    Finite(usize),
    Disconnected,
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Disconnected => f.write_str("disconnected"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelStats {
    pub num_vars: usize,
    pub linear_term_count: usize,
    pub linear_coeff_set: BTreeSet<i64>,
    pub quadratic_term_count: usize,
    pub quadratic_coeff_set: BTreeSet<i64>,
    /// `None` when skipped (see [`ModelStats::without_diameter`]).
    pub diameter: Option<Diameter>,
    pub offset: Rational,
}

impl ModelStats {
    pub fn of(model: &QuadraticModel) -> Self {
        let mut s = Self::without_diameter(model);
        s.diameter = Some(diameter(model));
        s
    }

    /// Counts only; the all-pairs search is quadratic in the variable count.
    pub fn without_diameter(model: &QuadraticModel) -> Self {
        ModelStats {
            num_vars: model.num_vars(),
            linear_term_count: model.linear().len(),
            linear_coeff_set: model.linear().iter().map(|t| t.1).collect(),
            quadratic_term_count: model.quadratic().len(),
            quadratic_coeff_set: model.quadratic().iter().map(|c| c.weight).collect(),
            diameter: None,
            offset: model.offset(),
        }
    }
}

pub fn stats(model: &QuadraticModel) -> ModelStats {
    ModelStats::of(model)
}

/// Largest shortest-path length over the graph of nonzero quadratic terms.
/// Models with 0 or 1 variables have diameter 0.
pub fn diameter(model: &QuadraticModel) -> Diameter {
    let n = model.num_vars();
    if n <= 1 {
        return Diameter::Finite(0);
    }
    let mut deg = vec![0usize; n + 1];
    for c in model.quadratic() {
        deg[c.i as usize + 1] += 1;
        deg[c.j as usize + 1] += 1;
    }
    for v in 0..n {
        deg[v + 1] += deg[v];
    }
    let start = deg.clone();
    let mut fill = deg;
    let mut adj = vec![0u32; 2 * model.quadratic().len()];
    for c in model.quadratic() {
        adj[fill[c.i as usize]] = c.j;
        fill[c.i as usize] += 1;
        adj[fill[c.j as usize]] = c.i;
        fill[c.j as usize] += 1;
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut best = 0;
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        let mut seen = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[start[u]..start[u + 1]] {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    best = best.max(dist[w]);
                    seen += 1;
                    queue.push_back(w);
                }
            }
        }
        if seen < n {
            return Diameter::Disconnected;
        }
    }
    Diameter::Finite(best)
}
