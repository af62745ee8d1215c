//! Reductions of classic permutation problems to placement instances, plus seeded
//! instance generators and the plain-text input formats.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kernels::PartialPermutation;
use crate::ppp::{PppError, PppInstance};

pub type Matrix = Vec<Vec<i64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("matrices must both be {expected}x{expected}")]
    DimensionMismatch { expected: usize },
    #[error("matrix is not square")]
    NonSquare,
    #[error("graph tour needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("guest has {guest} nodes but host only {host}")]
    GuestLargerThanHost { guest: usize, host: usize },
    #[error("left side has {left} nodes but right only {right}")]
    LeftLargerThanRight { left: usize, right: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("node {node} outside 0..{nodes}")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("cannot place {edges} edges on {nodes} nodes")]
    TooManyEdges { nodes: usize, edges: usize },
    #[error("weight product overflows 64 bits")]
    Overflow,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Ppp(#[from] PppError),
}

/// Undirected simple graph with integer edge weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    nodes: usize,
    /// Keyed by `(u, v)` with `u < v`.
    edges: BTreeMap<(usize, usize), i64>,
}

impl WeightedGraph {
    pub fn new(nodes: usize) -> Self {
        WeightedGraph { nodes, edges: BTreeMap::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: i64) -> Result<(), ReductionError> {
        for x in [u, v] {
            if x >= self.nodes {
                return Err(ReductionError::NodeOutOfRange { node: x, nodes: self.nodes });
            }
        }
        if u == v {
            return Err(ReductionError::SelfLoop(u));
        }
        let key = (u.min(v), u.max(v));
        if self.edges.insert(key, w).is_some() {
            return Err(ReductionError::DuplicateEdge(key.0, key.1));
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<i64> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn max_abs_weight(&self) -> i64 {
        self.edges.values().map(|w| w.saturating_abs()).max().unwrap_or(0)
    }
}

/// Left nodes `0..left`, right nodes `0..right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

fn check_square(a: &Matrix) -> Result<usize, ReductionError> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(ReductionError::NonSquare);
    }
    Ok(n)
}

/// `sum_{i,i'} f[i][i'] * d[p(i)][p(i')]`.
pub fn qap_value(flows: &Matrix, distances: &Matrix, p: &PartialPermutation) -> i64 {
    let v = p.values();
    let mut s = 0;
    for (i, row) in flows.iter().enumerate() {
        for (ip, &f) in row.iter().enumerate() {
            s += f * distances[v[i]][v[ip]];
        }
    }
    s
}

/// Length of the closed tour visiting `p(0), p(1), ...`.
pub fn tsp_value(distances: &Matrix, p: &PartialPermutation) -> i64 {
    let v = p.values();
    let n = v.len();
    (0..n).map(|i| if n > 1 { distances[v[i]][v[(i + 1) % n]] } else { 0 }).sum()
}

/// Tour length where a missing edge costs `big`.
pub fn tsp_graph_value(graph: &WeightedGraph, big: i64, p: &PartialPermutation) -> i64 {
    let v = p.values();
    let n = v.len();
    (0..n).map(|i| graph.weight(v[i], v[(i + 1) % n]).unwrap_or(big)).sum()
}

pub fn qap_to_ppp(flows: &Matrix, distances: &Matrix) -> Result<PppInstance, ReductionError> {
    let n = check_square(flows)?;
    if check_square(distances)? != n {
        return Err(ReductionError::DimensionMismatch { expected: n });
    }
    let mut inst = PppInstance::new(n, n)?;
    let mul = |a: i64, b: i64| a.checked_mul(b).ok_or(ReductionError::Overflow);
    for i in 0..n {
        for j in 0..n {
            inst.add_potential(i, j, mul(flows[i][i], distances[j][j])?)?;
        }
    }
    for i in 0..n {
        for ip in i + 1..n {
            let (f, fr) = (flows[i][ip], flows[ip][i]);
            if f == 0 && fr == 0 {
                continue;
            }
            for j in 0..n {
                for jp in 0..n {
                    if j != jp {
                        let v = mul(f, distances[j][jp])?.checked_add(mul(fr, distances[jp][j])?).ok_or(ReductionError::Overflow)?;
                        inst.add_interaction(i, j, ip, jp, v)?;
                    }
                }
            }
        }
    }
    Ok(inst)
}

/// Position `i` is followed by `(i + 1) mod n`; the wraparound pair is stored in canonical order.
pub fn tsp_to_ppp(distances: &Matrix) -> Result<PppInstance, ReductionError> {
    let n = check_square(distances)?;
    let mut inst = PppInstance::new(n, n)?;
    for i in 0..n {
        let ip = (i + 1) % n;
        if ip == i {
            continue;
        }
        for j in 0..n {
            for jp in 0..n {
                if j != jp {
                    inst.add_interaction(i, j, ip, jp, distances[j][jp])?;
                }
            }
        }
    }
    Ok(inst)
}

/// Penalty for stepping along a non-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Big {
    Auto,
    Fixed(i64),
}

impl FromStr for Big {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Big::Auto);
        }
        s.parse().map(Big::Fixed).map_err(|_| format!("BIG must be AUTO or an integer, got '{s}'"))
    }
}

/// `n * max|w| + 1`: more than any tour that uses only edges.
pub fn auto_big(graph: &WeightedGraph) -> i64 {
    (graph.num_nodes() as i64).saturating_mul(graph.max_abs_weight()).saturating_add(1)
}

/// Sparse tour problem. Returns the instance and its shift `n * BIG`, also stored
/// on the instance, so that `tour length = PPP + shift`.
pub fn tsp_graph_to_ppp(graph: &WeightedGraph, big: Big) -> Result<(PppInstance, i64), ReductionError> {
    let n = graph.num_nodes();
    if n < 3 {
        return Err(ReductionError::TooFewNodes(n));
    }
    let big = match big {
        Big::Auto => auto_big(graph),
        Big::Fixed(b) => b,
    };
    let mut inst = PppInstance::new(n, n)?;
    for i in 0..n {
        let ip = (i + 1) % n;
        for (u, v, w) in graph.edges() {
            let d = w.checked_sub(big).ok_or(ReductionError::Overflow)?;
            inst.add_interaction(i, u, ip, v, d)?;
            inst.add_interaction(i, v, ip, u, d)?;
        }
    }
    let shift = (n as i64).checked_mul(big).ok_or(ReductionError::Overflow)?;
    inst.set_shift(shift);
    Ok((inst, shift))
}

/// Minimum is `-|E(guest)|` exactly when the guest embeds in the host. Weights are ignored.
pub fn subgraph_iso_to_ppp(guest: &WeightedGraph, host: &WeightedGraph) -> Result<PppInstance, ReductionError> {
    let (m, n) = (guest.num_nodes(), host.num_nodes());
    if m > n {
        return Err(ReductionError::GuestLargerThanHost { guest: m, host: n });
    }
    let mut inst = PppInstance::new(m, n)?;
    for (i, ip, _) in guest.edges() {
        for (j, jp, _) in host.edges() {
            inst.add_interaction(i, j, ip, jp, -1)?;
            inst.add_interaction(i, jp, ip, j, -1)?;
        }
    }
    Ok(inst)
}

/// Edge `{i, j}` is matched when the permutation swaps `i` and `j`.
pub fn matching_to_ppp(graph: &WeightedGraph) -> Result<PppInstance, ReductionError> {
    let n = graph.num_nodes();
    let mut inst = PppInstance::new(n, n)?;
    for (i, j, w) in graph.edges() {
        inst.add_interaction(i, j, j, i, -w)?;
    }
    Ok(inst)
}

pub fn bipartite_matching_to_ppp(graph: &BipartiteGraph) -> Result<PppInstance, ReductionError> {
    if graph.left > graph.right {
        return Err(ReductionError::LeftLargerThanRight { left: graph.left, right: graph.right });
    }
    let mut inst = PppInstance::new(graph.left, graph.right)?;
    for &(i, j, w) in &graph.edges {
        inst.add_potential(i, j, -w)?;
    }
    Ok(inst)
}

// ---- generators ----

/// Exactly `edges` distinct edges chosen uniformly, weights uniform in `1..=100`.
pub fn random_graph(nodes: usize, edges: usize, seed: u64) -> Result<WeightedGraph, ReductionError> {
    let pairs = nodes * nodes.saturating_sub(1) / 2;
    if edges > pairs {
        return Err(ReductionError::TooManyEdges { nodes, edges });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(nodes);
    let mut picked = sample(&mut rng, pairs, edges).into_vec();
    picked.sort_unstable();
    for k in picked {
        let (u, v) = unrank_pair(k, nodes);
        g.add_edge(u, v, rng.gen_range(1..=100))?;
    }
    Ok(g)
}

/// The `k`-th pair `(u, v)`, `u < v`, in row-major order.
fn unrank_pair(mut k: usize, n: usize) -> (usize, usize) {
    let mut u = 0;
    while k >= n - 1 - u {
        k -= n - 1 - u;
        u += 1;
    }
    (u, u + 1 + k)
}

/// Flows and distances uniform in `1..=100`, zero diagonals.
pub fn random_qap(n: usize, seed: u64) -> (Matrix, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = |rng: &mut ChaCha8Rng| -> Matrix {
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { rng.gen_range(1..=100) }).collect()).collect()
    };
    let f = gen(&mut rng);
    let d = gen(&mut rng);
    (f, d)
}

/// Symmetric distances uniform in `1..=100`, zero diagonal.
pub fn random_tsp(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1..=100);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    d
}

// ---- text formats ----

/// Non-empty lines with `#` comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn int(tok: &str, line: usize) -> Result<i64, ReductionError> {
    tok.parse().map_err(|_| ReductionError::Parse { line, msg: format!("expected an integer, got '{tok}'") })
}

fn index(tok: &str, line: usize) -> Result<usize, ReductionError> {
    tok.parse().map_err(|_| ReductionError::Parse { line, msg: format!("expected a node index, got '{tok}'") })
}

fn tokens(text: &str) -> Result<Vec<(usize, i64)>, ReductionError> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        for t in l.split_whitespace() {
            out.push((line, int(t, line)?));
        }
    }
    Ok(out)
}

fn square(vals: &[(usize, i64)], n: usize) -> Matrix {
    vals.chunks(n.max(1)).take(n).map(|r| r.iter().map(|t| t.1).collect()).collect()
}

fn exact_sqrt(x: usize) -> Option<usize> {
    let r = (x as f64).sqrt().round() as usize;
    (r * r == x).then_some(r)
}

/// `k` square matrices, optionally preceded by their dimension.
fn parse_matrices(text: &str, k: usize) -> Result<Vec<Matrix>, ReductionError> {
    let toks = tokens(text)?;
    let last = toks.last().map_or(0, |t| t.0);
    let mut body = &toks[..];
    let n = match toks.first() {
        Some(&(_, lead)) if lead >= 0 && toks.len() == 1 + k * (lead as usize).pow(2) => {
            body = &toks[1..];
            lead as usize
        }
        _ => {
            if toks.len() % k != 0 {
                return Err(ReductionError::Parse { line: last, msg: format!("cannot split {} numbers into {k} square matrices", toks.len()) });
            }
            exact_sqrt(toks.len() / k).ok_or_else(|| ReductionError::Parse {
                line: last,
                msg: format!("{} numbers do not form {k} square matrices", toks.len()),
            })?
        }
    };
    Ok((0..k).map(|c| square(&body[c * n * n..(c + 1) * n * n], n)).collect())
}

/// Flow matrix then distance matrix, with an optional leading `n`.
pub fn parse_qap(text: &str) -> Result<(Matrix, Matrix), ReductionError> {
    let mut m = parse_matrices(text, 2)?;
    let d = m.pop().expect("two matrices");
    let f = m.pop().expect("two matrices");
    Ok((f, d))
}

/// One distance matrix, with an optional leading `n`.
pub fn parse_tsp(text: &str) -> Result<Matrix, ReductionError> {
    Ok(parse_matrices(text, 1)?.pop().expect("one matrix"))
}

fn parse_graph_lines<'a>(lines: &mut std::iter::Peekable<impl Iterator<Item = (usize, &'a str)>>) -> Result<WeightedGraph, ReductionError> {
    let (line, head) = lines.next().ok_or(ReductionError::Parse { line: 0, msg: "missing 'nodes N' header".into() })?;
    let mut parts = head.split_whitespace();
    let nodes = match (parts.next(), parts.next(), parts.next()) {
        (Some(kw), Some(n), None) if kw.eq_ignore_ascii_case("nodes") => index(n, line)?,
        _ => return Err(ReductionError::Parse { line, msg: format!("expected 'nodes N', got '{head}'") }),
    };
    let mut g = WeightedGraph::new(nodes);
    while let Some(&(line, l)) = lines.peek() {
        if l.to_ascii_lowercase().starts_with("nodes") {
            break;
        }
        lines.next();
        let t: Vec<&str> = l.split_whitespace().collect();
        let (u, v, w) = match t.as_slice() {
            [u, v] => (index(u, line)?, index(v, line)?, 1),
            [u, v, w] => (index(u, line)?, index(v, line)?, int(w, line)?),
            _ => return Err(ReductionError::Parse { line, msg: format!("expected 'u v w', got '{l}'") }),
        };
        g.add_edge(u, v, w).map_err(|e| ReductionError::Parse { line, msg: e.to_string() })?;
    }
    Ok(g)
}

/// `nodes N` then one `u v w` edge per line; a missing weight means 1.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, ReductionError> {
    let mut lines = content_lines(text).peekable();
    let g = parse_graph_lines(&mut lines)?;
    if let Some((line, l)) = lines.next() {
        return Err(ReductionError::Parse { line, msg: format!("unexpected '{l}' after the graph") });
    }
    Ok(g)
}

/// Two graphs back to back: the guest, then the host.
pub fn parse_subiso(text: &str) -> Result<(WeightedGraph, WeightedGraph), ReductionError> {
    let mut lines = content_lines(text).peekable();
    let guest = parse_graph_lines(&mut lines)?;
    let host = parse_graph_lines(&mut lines)?;
    if let Some((line, l)) = lines.next() {
        return Err(ReductionError::Parse { line, msg: format!("unexpected '{l}' after the host graph") });
    }
    Ok((guest, host))
}

/// `m n` header then `i j w` edges from left node `i` to right node `j`.
pub fn parse_bipartite(text: &str) -> Result<BipartiteGraph, ReductionError> {
    let mut lines = content_lines(text);
    let (line, head) = lines.next().ok_or(ReductionError::Parse { line: 0, msg: "missing 'm n' header".into() })?;
    let h: Vec<&str> = head.split_whitespace().collect();
    let [m, n] = h.as_slice() else {
        return Err(ReductionError::Parse { line, msg: format!("expected 'm n', got '{head}'") });
    };
    let (left, right) = (index(m, line)?, index(n, line)?);
    let mut edges = Vec::new();
    for (line, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        let [i, j, w] = t.as_slice() else {
            return Err(ReductionError::Parse { line, msg: format!("expected 'i j w', got '{l}'") });
        };
        let (i, j) = (index(i, line)?, index(j, line)?);
        if i >= left || j >= right {
            return Err(ReductionError::Parse { line, msg: format!("edge ({i},{j}) outside {left}x{right}") });
        }
        edges.push((i, j, int(w, line)?));
    }
    Ok(BipartiteGraph { left, right, edges })
}

/// Problems with a reduction to placements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Qap,
    Tsp,
    TspGraph,
    Subiso,
    Matching,
    Bimatching,
}

impl Problem {
    pub const ALL: [Problem; 6] =
        [Problem::Qap, Problem::Tsp, Problem::TspGraph, Problem::Subiso, Problem::Matching, Problem::Bimatching];

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Qap => "qap",
            Problem::Tsp => "tsp",
            Problem::TspGraph => "tsp-graph",
            Problem::Subiso => "subiso",
            Problem::Matching => "matching",
            Problem::Bimatching => "bimatching",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        Problem::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            format!("unknown problem '{s}', expected one of qap, tsp, tsp-graph, subiso, matching, bimatching")
        })
    }
}

/// Parses an input file for `problem` and reduces it.
pub fn reduce_text(problem: Problem, text: &str, big: Big) -> Result<PppInstance, ReductionError> {
    match problem {
        Problem::Qap => {
            let (f, d) = parse_qap(text)?;
            qap_to_ppp(&f, &d)
        }
        Problem::Tsp => tsp_to_ppp(&parse_tsp(text)?),
        Problem::TspGraph => Ok(tsp_graph_to_ppp(&parse_graph(text)?, big)?.0),
        Problem::Subiso => {
            let (g, h) = parse_subiso(text)?;
            subgraph_iso_to_ppp(&g, &h)
        }
        Problem::Matching => matching_to_ppp(&parse_graph(text)?),
        Problem::Bimatching => bipartite_matching_to_ppp(&parse_bipartite(text)?),
    }
}

/// A seeded random instance of `problem` with `nodes` nodes (and `edges` edges for graph problems).
pub fn generate(problem: Problem, nodes: usize, edges: usize, seed: u64) -> Result<PppInstance, ReductionError> {
    match problem {
        Problem::Qap => {
            let (f, d) = random_qap(nodes, seed);
            qap_to_ppp(&f, &d)
        }
        Problem::Tsp => tsp_to_ppp(&random_tsp(nodes, seed)),
        Problem::TspGraph => Ok(tsp_graph_to_ppp(&random_graph(nodes, edges, seed)?, Big::Auto)?.0),
        Problem::Subiso => {
            // Guest with half the nodes and a proportional share of the edges.
            let host = random_graph(nodes, edges, seed)?;
            let gn = (nodes / 2).max(1);
            let ge = (edges * gn * gn.saturating_sub(1)).checked_div(nodes * nodes.saturating_sub(1)).unwrap_or(0);
            let guest = random_graph(gn, ge, seed.wrapping_add(1))?;
            subgraph_iso_to_ppp(&guest, &host)
        }
        Problem::Matching => matching_to_ppp(&random_graph(nodes, edges, seed)?),
        Problem::Bimatching => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total = nodes * nodes;
            let edges = sample(&mut rng, total, edges.min(total)).into_vec();
            let mut edges: Vec<(usize, usize, i64)> = edges.into_iter().map(|k| (k / nodes, k % nodes, 0)).collect();
            edges.sort_unstable();
            for e in &mut edges {
                e.2 = rng.gen_range(1..=100);
            }
            bipartite_matching_to_ppp(&BipartiteGraph { left: nodes, right: nodes, edges })
        }
    }
}
