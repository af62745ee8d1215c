//! Exact minimisation by cutset conditioning.
//!
//! A greedy vertex cutset is enumerated in Gray-code order. Once the cutset is
//! fixed, the rest of the interaction graph falls apart into small components,
//! each of which is minimised independently by its own Gray-code sweep. This
//! reaches sparse models well past the plain brute-force limit.

use super::graph::{to_assignment, Csr};
use super::SolverError;
use crate::model::{QuadraticModel, Rational};

/// Largest `log2` of the estimated work accepted by [`exact_minimum`].
pub const WORK_LIMIT_LOG2: u32 = 36;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMinimum {
    pub minimum: Rational,
    /// One minimizer.
    pub assignment: Vec<i8>,
    pub cutset_size: usize,
}

struct Component {
    vars: Vec<usize>,
    /// Internal edges as (local a, local b, weight), a < b.
    edges: Vec<(usize, usize, i64)>,
    /// Local adjacency for field updates.
    adj: Vec<Vec<(usize, i64)>>,
}

fn components(csr: &Csr, removed: &[bool]) -> Vec<Vec<usize>> {
    let n = csr.len();
    let mut seen = removed.to_vec();
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let u = comp[k];
            k += 1;
            for (w, _) in csr.neighbours(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// log2 of `2^|cut| * sum(2^|component|)`.
fn cost_log2(cut: usize, comps: &[Vec<usize>]) -> f64 {
    let inner: f64 = comps.iter().map(|c| (c.len() as f64).exp2()).sum::<f64>().max(1.0);
    cut as f64 + inner.log2()
}

/// Greedy cutset: repeatedly remove the vertex of largest remaining degree and
/// keep the prefix with the smallest estimated work.
fn choose_cutset(csr: &Csr) -> (Vec<usize>, f64) {
    let n = csr.len();
    let mut removed = vec![false; n];
    let mut degree: Vec<usize> = (0..n).map(|v| csr.degree(v)).collect();
    let mut order = Vec::new();
    let mut best = (cost_log2(0, &components(csr, &removed)), 0usize);
    loop {
        let pick = (0..n).filter(|&v| !removed[v] && degree[v] > 0).max_by_key(|&v| (degree[v], std::cmp::Reverse(v)));
        let Some(v) = pick else { break };
        removed[v] = true;
        order.push(v);
        for (u, _) in csr.neighbours(v) {
            degree[u] = degree[u].saturating_sub(1);
        }
        let c = cost_log2(order.len(), &components(csr, &removed));
        if c < best.0 {
            best = (c, order.len());
        }
        if order.len() >= 62 {
            break;
        }
    }
    order.truncate(best.1);
    (order, best.0)
}

pub fn exact_minimum(model: &QuadraticModel) -> Result<ExactMinimum, SolverError> {
    let csr = Csr::new(model)?;
    let n = csr.len();
    let (cut, cost) = choose_cutset(&csr);
    if cost > WORK_LIMIT_LOG2 as f64 {
        return Err(SolverError::TooLarge { num_vars: n, cap: WORK_LIMIT_LOG2 as usize });
    }
    let mut in_cut = vec![false; n];
    for &v in &cut {
        in_cut[v] = true;
    }
    let mut local = vec![usize::MAX; n];
    let comps: Vec<Component> = components(&csr, &in_cut)
        .into_iter()
        .map(|vars| {
            for (k, &v) in vars.iter().enumerate() {
                local[v] = k;
            }
            let mut edges = Vec::new();
            let mut adj = vec![Vec::new(); vars.len()];
            for (a, &v) in vars.iter().enumerate() {
                for (u, w) in csr.neighbours(v) {
                    if !in_cut[u] {
                        let b = local[u];
                        adj[a].push((b, w));
                        if a < b {
                            edges.push((a, b, w));
                        }
                    }
                }
            }
            Component { vars, edges, adj }
        })
        .collect();

    let (hot, cold) = (csr.hot, csr.cold);
    let mut vals = vec![cold; n];
    // ext[v]: linear field of a non-cut variable including the cut's contribution.
    // g[u]: field of a cut variable from h and other cut variables only.
    let mut ext = csr.h.clone();
    let mut g = csr.h.clone();
    for &u in &cut {
        for (w, j) in csr.neighbours(u) {
            if in_cut[w] {
                g[w] += j * cold;
            } else {
                ext[w] += j * cold;
            }
        }
    }
    let mut e_cut: i64 = 0;
    for (k, &u) in cut.iter().enumerate() {
        e_cut += csr.h[u] * cold;
        for &w in &cut[k + 1..] {
            let j = csr.neighbours(u).find(|&(x, _)| x == w).map_or(0, |t| t.1);
            e_cut += j * cold * cold;
        }
    }

    let mut best_total = i64::MAX;
    let mut best_cut_vals: Vec<i64> = Vec::new();
    let mut best_comp_masks: Vec<u64> = Vec::new();
    let mut comp_masks = vec![0u64; comps.len()];
    let mut scratch_vals: Vec<i64> = Vec::new();
    let mut scratch_fields: Vec<i64> = Vec::new();

    for step in 0u64..1 << cut.len() {
        if step > 0 {
            let u = cut[step.trailing_zeros() as usize];
            let old = vals[u];
            let new = if old == hot { cold } else { hot };
            let delta = new - old;
            vals[u] = new;
            e_cut += delta * g[u];
            for (w, j) in csr.neighbours(u) {
                if in_cut[w] {
                    g[w] += j * delta;
                } else {
                    ext[w] += j * delta;
                }
            }
        }
        let mut total = e_cut;
        for (ci, comp) in comps.iter().enumerate() {
            let (e, mask) = minimise_component(comp, &ext, hot, cold, &mut scratch_vals, &mut scratch_fields);
            total += e;
            comp_masks[ci] = mask;
        }
        if total < best_total {
            best_total = total;
            best_cut_vals = cut.iter().map(|&u| vals[u]).collect();
            best_comp_masks.clone_from(&comp_masks);
        }
    }

    let mut out = vec![cold; n];
    for (k, &u) in cut.iter().enumerate() {
        out[u] = best_cut_vals[k];
    }
    for (comp, &mask) in comps.iter().zip(&best_comp_masks) {
        for (k, &v) in comp.vars.iter().enumerate() {
            if mask >> k & 1 == 1 {
                out[v] = hot;
            }
        }
    }
    debug_assert_eq!(csr.energy(&out), best_total);
    Ok(ExactMinimum {
        minimum: Rational::from_integer(best_total) + model.offset(),
        assignment: to_assignment(&out),
        cutset_size: cut.len(),
    })
}

/// Minimum over one component given external fields; returns (energy, argmin mask).
fn minimise_component(comp: &Component, ext: &[i64], hot: i64, cold: i64, vals: &mut Vec<i64>, fields: &mut Vec<i64>) -> (i64, u64) {
    let k = comp.vars.len();
    if k == 1 {
        let f = ext[comp.vars[0]];
        let (eh, ec) = (f * hot, f * cold);
        return if eh < ec { (eh, 1) } else { (ec, 0) };
    }
    vals.clear();
    vals.resize(k, cold);
    fields.clear();
    fields.extend(comp.vars.iter().map(|&v| ext[v]));
    let mut e: i64 = 0;
    for a in 0..k {
        e += fields[a] * cold;
    }
    for &(a, b, w) in &comp.edges {
        fields[a] += w * cold;
        fields[b] += w * cold;
        e += w * cold * cold;
    }
    let mut best = (e, 0u64);
    let mut mask = 0u64;
    for step in 1u64..1 << k {
        let a = step.trailing_zeros() as usize;
        let old = vals[a];
        let new = if old == hot { cold } else { hot };
        let delta = new - old;
        vals[a] = new;
        e += delta * fields[a];
        for &(b, w) in &comp.adj[a] {
            fields[b] += w * delta;
        }
        mask ^= 1 << a;
        if e < best.0 {
            best = (e, mask);
        }
    }
    best
}
