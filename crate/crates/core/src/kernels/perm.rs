use std::fmt;

use serde::{Deserialize, Serialize};

use super::KernelError;

/// Injection `[0, m) -> [0, n)`; `m == n` is a full permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialPermutation {
    n: usize,
    values: Vec<usize>,
}

impl PartialPermutation {
    pub fn new(values: Vec<usize>, n: usize) -> Result<Self, KernelError> {
        let mut seen = vec![false; n];
        for &v in &values {
            if v >= n || seen[v] {
                return Err(KernelError::NotInjective { values, n });
            }
            seen[v] = true;
        }
        Ok(PartialPermutation { n, values })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        assert!(m <= n);
        PartialPermutation { n, values: (0..m).collect() }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_full(&self) -> bool {
        self.m() == self.n
    }

    /// `inverse()[j]` is the `i` with `pi(i) = j`, if any.
    pub fn inverse(&self) -> Vec<Option<usize>> {
        let mut inv = vec![None; self.n];
        for (i, &j) in self.values.iter().enumerate() {
            inv[j] = Some(i);
        }
        inv
    }

    /// All injections in lexicographic order.
    pub fn all(m: usize, n: usize) -> Injections {
        Injections::new(m, n)
    }

    /// `n! / (n - m)!`, saturating.
    pub fn count(m: usize, n: usize) -> u64 {
        if m > n {
            return 0;
        }
        (n - m + 1..=n).fold(1u64, |acc, k| acc.saturating_mul(k as u64))
    }
}

impl fmt::Display for PartialPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Lexicographic iterator over injections.
pub struct Injections {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Injections {
    fn new(m: usize, n: usize) -> Self {
        Injections { n, current: (m <= n).then(|| (0..m).collect()) }
    }
}

impl Iterator for Injections {
    type Item = PartialPermutation;

    fn next(&mut self) -> Option<PartialPermutation> {
        let cur = self.current.take()?;
        let out = PartialPermutation { n: self.n, values: cur.clone() };
        self.current = successor(cur, self.n);
        Some(out)
    }
}

fn successor(mut v: Vec<usize>, n: usize) -> Option<Vec<usize>> {
    let m = v.len();
    let mut used = vec![false; n];
    for &x in &v {
        used[x] = true;
    }
    for pos in (0..m).rev() {
        used[v[pos]] = false;
        if let Some(next) = (v[pos] + 1..n).find(|&c| !used[c]) {
            v[pos] = next;
            used[next] = true;
            let mut fill = (0..n).filter(|&c| !used[c]);
            for slot in v.iter_mut().skip(pos + 1) {
                *slot = fill.next().expect("enough free values");
            }
            return Some(v);
        }
    }
    None
}
