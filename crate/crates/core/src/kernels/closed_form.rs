//! Published closed forms for kernel statistics, and a measured-vs-predicted table.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{KernelError, KernelSpec, Technique};
use crate::model::{format_rational, Kind, Rational};
use crate::stats::{Diameter, ModelStats};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelClosedForm {
    pub num_vars: usize,
    pub linear_count: usize,
    pub linear_coeffs: BTreeSet<i64>,
    pub quadratic_count: usize,
    pub quadratic_coeffs: BTreeSet<i64>,
    pub diameter: Diameter,
    pub offset: Rational,
    pub optimal: Rational,
}

fn set(v: impl IntoIterator<Item = i64>) -> BTreeSet<i64> {
    v.into_iter().collect()
}

fn count(v: i64) -> usize {
    usize::try_from(v).expect("closed form is non-negative in its domain")
}

/// Closed forms as printed: the full-permutation table for `m == n`, the
/// partial-permutation table for `m < n`. Valid for `n >= 3` (full) and
/// `2 <= m < n` (partial); `None` outside that range.
pub fn kernel_closed_form(technique: Technique, kind: Kind, m: usize, n: usize) -> Option<KernelClosedForm> {
    let spec = KernelSpec::new(technique, m, n, kind).ok()?;
    if (m == n && n < 3) || (m < n && m < 2) {
        return None;
    }
    let (mi, ni) = (m as i64, n as i64);
    let q = Rational::new;
    let r = Rational::from_integer;
    let f = if m == n {
        let n2 = ni * ni;
        let n3 = n2 * ni;
        match (technique, kind) {
            (Technique::OneHot, Kind::Qubo) => (n2, n2, set([-1]), n3 - n2, set([1]), 2, r(ni)),
            (Technique::OneHot, Kind::Ising) => (n2, n2, set([2 * ni - 4]), n3 - n2, set([1]), 2, r(n3 - 3 * n2 + 4 * ni)),
            (Technique::AllDifferent, Kind::Qubo) => (
                n2 - ni,
                n2 - 2 * ni,
                set([-(2 * ni - 3)].into_iter().chain((1..=ni - 3).map(|t| -2 * t))),
                (n3 - 3 * ni) / 2,
                set([-1, 2]),
                ni - 1,
                q(2 * n3 - 3 * n2 - 12 * ni, 6),
            ),
            (Technique::AllDifferent, Kind::Ising) => (
                n2 - ni,
                n2 + ni * (ni % 2) - 2 * ni,
                set([-(ni - 1), ni - 1].into_iter().chain((1..=ni - 3).map(|j| -(ni - 2 * j - 2)).filter(|&c| c != 0))),
                (n3 - 3 * ni) / 2,
                set([-1, 1]),
                ni - 1,
                q(n3 + 6 * n2 - ni, 6),
            ),
            (Technique::DualMatrix, Kind::Qubo) => {
                (2 * n2 - 2 * ni, 2 * n2 - 4 * ni, set([2]), 6 * n2 - 12 * ni + 4, set([-2, -1, 1]), 2 * ni - 3, r(2 * ni - 1))
            }
            (Technique::DualMatrix, Kind::Ising) => {
                (2 * n2 - 2 * ni, 4 * ni, set([-2, 2]), 6 * n2 - 12 * ni + 4, set([-2, -1, 1]), 2 * ni - 3, r(4 * n2 - 4))
            }
            (Technique::Extended, Kind::Qubo) => {
                (3 * n2 - 2 * ni, 3 * n2 - 6 * ni + 2, set([-1, 1, 2]), 6 * n2 - 8 * ni, set([-2, -1, 1]), 2 * ni, r(2 * ni))
            }
            (Technique::Extended, Kind::Ising) => {
                (3 * n2 - 2 * ni, n2 + 4 * ni - 4, set([-2, 1, 2]), 6 * n2 - 8 * ni, set([-2, -1, 1]), 2 * ni, r(6 * n2 - 4 * ni))
            }
        }
    } else {
        let mn = mi * ni;
        let one_hot_quad = (mi * mi * ni + mi * ni * ni) / 2 - mn;
        match (technique, kind) {
            (Technique::OneHot, Kind::Qubo) => (mn, mn, set([-1]), one_hot_quad, set([1, 2]), 2, r(mi)),
            (Technique::OneHot, Kind::Ising) => {
                (mn, mn, set([mi + ni - 3]), one_hot_quad, set([1]), 2, r(one_hot_quad - mn + 2 * mi))
            }
            (Technique::DualMatrix, Kind::Qubo) => {
                (2 * mn - mi - ni, 2 * mn - 2 * mi - 2 * ni, set([2]), 6 * mn - 6 * mi - 6 * ni + 4, set([-2, -1, 1]), mi + ni - 3, r(mi + ni - 1))
            }
            (Technique::DualMatrix, Kind::Ising) => {
                (2 * mn - mi - ni, 2 * mi + 2 * ni, set([-2, 2]), 6 * mn - 6 * mi - 6 * ni + 4, set([-2, -1, 1]), mi + ni - 3, r(4 * mn - 4))
            }
            (Technique::Extended, Kind::Qubo) => (
                3 * mn - mi - ni,
                3 * mn - 3 * mi - 2 * ni + 1,
                set([-1, 1, 2, 3]),
                6 * mn - 4 * mi - 4 * ni,
                set([-3, -2, -1, 1, 2]),
                mi + ni,
                q(3 * mi + ni, 2),
            ),
            (Technique::Extended, Kind::Ising) => (
                3 * mn - mi - ni,
                mn + 2 * mi + 2 * ni,
                set([-3, -1, 1, 2, 3, 4]),
                6 * mn - 4 * mi - 4 * ni,
                set([-3, -2, -1, 1, 2]),
                mi + ni,
                r(8 * mn - 4 * mi - 2 * ni),
            ),
            (Technique::AllDifferent, _) => unreachable!("rejected by KernelSpec::new"),
        }
    };
    let (vars, lc, ls, qc, qs, diam, off) = f;
    Some(KernelClosedForm {
        num_vars: count(vars),
        linear_count: count(lc),
        linear_coeffs: ls,
        quadratic_count: count(qc),
        quadratic_coeffs: qs,
        diameter: Diameter::Finite(count(diam)),
        offset: off,
        optimal: spec.optimal_value(),
    })
}

/// One measured kernel next to its closed-form prediction.
#[derive(Clone, Debug)]
pub struct KernelTableRow {
    pub technique: Technique,
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    pub stats: ModelStats,
    pub predicted: Option<KernelClosedForm>,
    /// Names of the cells where measurement and prediction differ.
    pub mismatches: Vec<&'static str>,
}

impl KernelTableRow {
    pub fn matches(&self) -> bool {
        self.predicted.is_some() && self.mismatches.is_empty()
    }
}

/// Cells where `stats` and `pred` disagree.
pub fn compare(stats: &ModelStats, pred: &KernelClosedForm) -> Vec<&'static str> {
    let mut out = Vec::new();
    let mut check = |ok: bool, name| {
        if !ok {
            out.push(name);
        }
    };
    check(stats.num_vars == pred.num_vars, "vars");
    check(stats.linear_term_count == pred.linear_count, "linear_count");
    check(stats.linear_coeff_set == pred.linear_coeffs, "linear_coeffs");
    check(stats.quadratic_term_count == pred.quadratic_count, "quad_count");
    check(stats.quadratic_coeff_set == pred.quadratic_coeffs, "quad_coeffs");
    check(stats.diameter.map_or(true, |d| d == pred.diameter), "diameter");
    check(stats.offset == pred.offset, "offset");
    out
}

/// Builds every requested kernel and compares it with the closed forms.
/// Invalid combinations (all-different with `m < n`, `m > n`) are skipped.
pub fn kernel_stats_table(
    techniques: &[Technique],
    kind: Kind,
    sizes: &[(usize, usize)],
) -> Result<Vec<KernelTableRow>, KernelError> {
    let mut rows = Vec::new();
    for &t in techniques {
        for &(m, n) in sizes {
            let Ok(spec) = KernelSpec::new(t, m, n, kind) else { continue };
            let handle = spec.build()?;
            let stats = ModelStats::of(&handle.model);
            let predicted = kernel_closed_form(t, kind, m, n);
            let mismatches = predicted.as_ref().map(|p| compare(&stats, p)).unwrap_or_default();
            rows.push(KernelTableRow { technique: t, kind, m, n, stats, predicted, mismatches });
        }
    }
    Ok(rows)
}

fn fmt_set(s: &BTreeSet<i64>) -> String {
    let items: Vec<String> = s.iter().map(i64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

pub fn table_to_tsv(rows: &[KernelTableRow]) -> String {
    let mut s = String::from(
        "technique\tkind\tm\tn\tvars\tlinear_count\tlinear_coeffs\tquad_count\tquad_coeffs\tdiameter\toffset\tpredicted_quad\tmatch\n",
    );
    for r in rows {
        let st = &r.stats;
        let diam = st.diameter.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        let pq = r.predicted.as_ref().map(|p| p.quadratic_count.to_string()).unwrap_or_else(|| "-".into());
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.technique,
            r.kind,
            r.m,
            r.n,
            st.num_vars,
            st.linear_term_count,
            fmt_set(&st.linear_coeff_set),
            st.quadratic_term_count,
            fmt_set(&st.quadratic_coeff_set),
            diam,
            format_rational(&st.offset),
            pq,
            r.matches()
        )
        .unwrap();
    }
    s
}
