//! Kernels whose minimizers are exactly the encodings of (partial) permutations.
//!
//! Four techniques are available:
//!
//! * one-hot: an `m x n` matrix `X` with one-hot rows and one-hot (or at most one hot) columns;
//! * all-different: `n` domain-wall rows of length `n - 1` holding distinct values;
//! * dual-matrix: domain-wall rows of `A` (`m x (n-1)`) hold `pi`, domain-wall columns of
//!   `B` (`(m-1) x n`) hold its dual, tied together through the row and column differences;
//! * extended: dual-matrix plus a one-hot matrix `X` pinned to the row differences.
//!
//! Variables are ordered `A` row-major, then `B`, then `X`. Boundary cells are guard
//! constants folded in during expansion.

mod closed_form;
mod perm;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{ExpressionBuilder, LinearForm};
use crate::layout::{Label, MatrixId, VariableLayout};
use crate::model::{Kind, ModelError, QuadraticModel, Rational};

pub use closed_form::{compare, kernel_closed_form, kernel_stats_table, table_to_tsv, KernelClosedForm, KernelTableRow};
pub use perm::{Injections, PartialPermutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Technique {
    OneHot,
    AllDifferent,
    DualMatrix,
    Extended,
}

impl Technique {
    pub const ALL: [Technique; 4] = [Technique::OneHot, Technique::AllDifferent, Technique::DualMatrix, Technique::Extended];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::OneHot => "one-hot",
            Technique::AllDifferent => "all-different",
            Technique::DualMatrix => "dual-matrix",
            Technique::Extended => "extended",
        }
    }

    pub fn supports_partial(self) -> bool {
        self != Technique::AllDifferent
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Technique::ALL
            .into_iter()
            .find(|t| t.as_str() == s.to_ascii_lowercase().replace('_', "-"))
            .ok_or_else(|| format!("unknown technique '{s}' (expected one-hot, all-different, dual-matrix or extended)"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("{technique} cannot generate partial permutations (m={m}, n={n})")]
    UnsupportedCombination { technique: Technique, m: usize, n: usize },
    #[error("need 1 <= m <= n, got m={m}, n={n}")]
    InvalidDimensions { m: usize, n: usize },
    #[error("permutation of {got_m} of {got_n} does not fit a kernel for {m} of {n}")]
    InconsistentDimensions { m: usize, n: usize, got_m: usize, got_n: usize },
    #[error("{values:?} is not an injection into 0..{n}")]
    NotInjective { values: Vec<usize>, n: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Why an assignment is not the encoding of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfeasibleReason {
    Malformed(String),
    RowNotOneHot(usize),
    ColumnNotOneHot(usize),
    ColumnHasSeveralHot(usize),
    RowNotDomainWall(usize),
    ColumnNotDomainWall(usize),
    /// Two rows hold the same value.
    DuplicateValue(usize),
    /// `p(pi(i)) != i`.
    DualMismatch { row: usize },
    /// The one-hot matrix disagrees with the row differences.
    OneHotMismatch { row: usize, col: usize },
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::Malformed(s) => write!(f, "malformed assignment: {s}"),
            InfeasibleReason::RowNotOneHot(i) => write!(f, "row {i} is not one-hot"),
            InfeasibleReason::ColumnNotOneHot(j) => write!(f, "column {j} is not one-hot"),
            InfeasibleReason::ColumnHasSeveralHot(j) => write!(f, "column {j} has more than one hot cell"),
            InfeasibleReason::RowNotDomainWall(i) => write!(f, "row {i} is not a domain wall"),
            InfeasibleReason::ColumnNotDomainWall(j) => write!(f, "column {j} is not a domain wall"),
            InfeasibleReason::DuplicateValue(v) => write!(f, "value {v} appears in two rows"),
            InfeasibleReason::DualMismatch { row } => write!(f, "dual condition fails for row {row}"),
            InfeasibleReason::OneHotMismatch { row, col } => write!(f, "one-hot cell ({row},{col}) disagrees with the row difference"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Feasible(PartialPermutation),
    Infeasible(InfeasibleReason),
}

impl Decoded {
    pub fn permutation(&self) -> Option<&PartialPermutation> {
        match self {
            Decoded::Feasible(p) => Some(p),
            Decoded::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Decoded::Feasible(_))
    }
}

#[derive(Clone, Copy, Debug)]
struct Block {
    rows: usize,
    cols: usize,
    base: usize,
}

impl Block {
    fn len(&self) -> usize {
        self.rows * self.cols
    }

    fn index(&self, r: usize, c: usize) -> usize {
        self.base + r * self.cols + c
    }
}

/// Technique, dimensions and kind of a kernel, without the model itself.
/// Everything about layout, encoding and decoding is derived from these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelSpec {
    pub technique: Technique,
    pub m: usize,
    pub n: usize,
    pub kind: Kind,
}

impl KernelSpec {
    pub fn new(technique: Technique, m: usize, n: usize, kind: Kind) -> Result<Self, KernelError> {
        if m == 0 || m > n {
            return Err(KernelError::InvalidDimensions { m, n });
        }
        if m < n && !technique.supports_partial() {
            return Err(KernelError::UnsupportedCombination { technique, m, n });
        }
        Ok(KernelSpec { technique, m, n, kind })
    }

    pub fn is_full(&self) -> bool {
        self.m == self.n
    }

    /// The domain-wall row matrix: `A`, or `X` for all-different.
    fn a_block(&self) -> Option<Block> {
        match self.technique {
            Technique::OneHot => None,
            Technique::AllDifferent => Some(Block { rows: self.n, cols: self.n - 1, base: 0 }),
            Technique::DualMatrix | Technique::Extended => Some(Block { rows: self.m, cols: self.n - 1, base: 0 }),
        }
    }

    fn b_block(&self) -> Option<Block> {
        match self.technique {
            Technique::DualMatrix | Technique::Extended => {
                Some(Block { rows: self.m - 1, cols: self.n, base: self.m * (self.n - 1) })
            }
            _ => None,
        }
    }

    /// The one-hot matrix.
    fn x_block(&self) -> Option<Block> {
        match self.technique {
            Technique::OneHot => Some(Block { rows: self.m, cols: self.n, base: 0 }),
            Technique::Extended => {
                Some(Block { rows: self.m, cols: self.n, base: self.m * (self.n - 1) + (self.m - 1) * self.n })
            }
            _ => None,
        }
    }

    fn a_matrix_id(&self) -> MatrixId {
        if self.technique == Technique::AllDifferent {
            MatrixId::X
        } else {
            MatrixId::A
        }
    }

    pub fn num_vars(&self) -> usize {
        [self.a_block(), self.b_block(), self.x_block()].iter().flatten().map(Block::len).sum()
    }

    pub fn has_one_hot_matrix(&self) -> bool {
        self.x_block().is_some()
    }

    pub fn has_row_walls(&self) -> bool {
        self.a_block().is_some()
    }

    pub fn layout(&self) -> VariableLayout {
        let mut l = VariableLayout::new();
        let (hot, cold) = (self.kind.hot(), self.kind.cold());
        if let Some(a) = self.a_block() {
            let id = self.a_matrix_id();
            l.push_matrix(id, a.rows, a.cols).expect("fresh labels");
            for i in 0..a.rows as i64 {
                l.add_guard(Label::new(id, i, -1), hot).expect("guard");
                l.add_guard(Label::new(id, i, a.cols as i64), cold).expect("guard");
            }
        }
        if let Some(b) = self.b_block() {
            l.push_matrix(MatrixId::B, b.rows, b.cols).expect("fresh labels");
            for j in 0..b.cols as i64 {
                l.add_guard(Label::new(MatrixId::B, -1, j), hot).expect("guard");
                l.add_guard(Label::new(MatrixId::B, b.rows as i64, j), cold).expect("guard");
            }
        }
        if let Some(x) = self.x_block() {
            l.push_matrix(MatrixId::X, x.rows, x.cols).expect("fresh labels");
        }
        l
    }

    /// Minimum of the kernel energy.
    pub fn optimal_value(&self) -> Rational {
        let (m, n) = (self.m as i64, self.n as i64);
        let r = Rational::from_integer;
        match (self.technique, self.kind) {
            (Technique::OneHot, _) => r(0),
            (Technique::AllDifferent, Kind::Qubo) => Rational::new(n, 2),
            (Technique::AllDifferent, Kind::Ising) => r(2 * n),
            (Technique::DualMatrix, Kind::Qubo) => r(n),
            (Technique::DualMatrix, Kind::Ising) => r(4 * n),
            (Technique::Extended, Kind::Qubo) => Rational::new(m + n, 2),
            (Technique::Extended, Kind::Ising) => r(2 * m + 2 * n),
        }
    }

    fn constant(&self, hot: bool) -> LinearForm {
        LinearForm::constant(if hot { self.kind.hot() } else { self.kind.cold() } as i64)
    }

    /// Cell `(i, j)` of the row domain-wall matrix, `j` in `-1..=n-1`.
    fn a_cell(&self, i: usize, j: i64) -> LinearForm {
        let a = self.a_block().expect("technique has row walls");
        if j < 0 {
            self.constant(true)
        } else if j as usize >= a.cols {
            self.constant(false)
        } else {
            LinearForm::var(a.index(i, j as usize))
        }
    }

    /// Cell `(i, j)` of `B`, `i` in `-1..=m-1`.
    fn b_cell(&self, i: i64, j: usize) -> LinearForm {
        let b = self.b_block().expect("technique has B");
        if i < 0 {
            self.constant(true)
        } else if i as usize >= b.rows {
            self.constant(false)
        } else {
            LinearForm::var(b.index(i as usize, j))
        }
    }

    /// Row difference `a[i][j-1] - a[i][j]`: 1 (bits) or 2 (spins) exactly at `j = pi(i)`.
    pub fn row_delta(&self, i: usize, j: usize) -> LinearForm {
        self.a_cell(i, j as i64 - 1) - self.a_cell(i, j as i64)
    }

    /// Column difference `b[i-1][j] - b[i][j]`.
    pub fn col_delta(&self, i: usize, j: usize) -> LinearForm {
        self.b_cell(i as i64 - 1, j) - self.b_cell(i as i64, j)
    }

    /// Variable index of one-hot cell `(i, j)`.
    pub fn x_index(&self, i: usize, j: usize) -> Option<usize> {
        self.x_block().filter(|x| i < x.rows && j < x.cols).map(|x| x.index(i, j))
    }

    /// Adds `weight * kernel` to the builder.
    pub fn emit(&self, b: &mut ExpressionBuilder, weight: i64) {
        let (m, n) = (self.m, self.n);
        let (mi, ni) = (m as i64, n as i64);
        let w = Rational::from_integer(weight);
        let hw = Rational::new(weight, 2);
        let ising = self.kind == Kind::Ising;
        match self.technique {
            Technique::OneHot => {
                let x = self.x_block().unwrap();
                let row = |i: usize| LinearForm::sum((0..n).map(|j| x.index(i, j)));
                let col = |j: usize| LinearForm::sum((0..m).map(|i| x.index(i, j)));
                b.reserve(m * n * (m + n) / 2);
                if self.is_full() {
                    for k in 0..n {
                        for f in [row(k), col(k)] {
                            if ising {
                                b.add_square(hw, &(f + (ni - 2)));
                            } else {
                                b.add_square(hw, &(LinearForm::constant(1) - f));
                            }
                        }
                    }
                } else {
                    for i in 0..m {
                        if ising {
                            b.add_square(hw, &(row(i) + (ni - 2)));
                        } else {
                            b.add_square(w, &(LinearForm::constant(1) - row(i)));
                        }
                    }
                    for j in 0..n {
                        let c = col(j);
                        if ising {
                            b.add_product(hw, &(c.clone() + mi), &(c + (mi - 2)));
                        } else {
                            b.add_product(hw, &c, &(c.clone() - 1));
                        }
                    }
                }
            }
            Technique::AllDifferent => {
                let a = self.a_block().unwrap();
                for i in 0..n {
                    for j in 0..n {
                        b.add_square(hw, &self.row_delta(i, j));
                    }
                }
                for j in 0..a.cols {
                    let col = LinearForm::sum((0..n).map(|i| a.index(i, j)));
                    if ising {
                        b.add_square(hw, &(LinearForm::constant(ni - 2 * j as i64 - 2) - col));
                    } else {
                        b.add_square(w, &(LinearForm::constant(ni - j as i64 - 1) - col));
                    }
                }
            }
            Technique::DualMatrix | Technique::Extended => {
                for i in 0..m {
                    for j in 0..n {
                        let da = self.row_delta(i, j);
                        let db = self.col_delta(i, j);
                        b.add_square(hw, &da);
                        b.add_square(hw, &db);
                        if self.technique == Technique::DualMatrix {
                            b.add_square(hw, &(da - db));
                            continue;
                        }
                        let mut x = LinearForm::var(self.x_index(i, j).unwrap());
                        if ising {
                            x = x + 1;
                        }
                        if self.is_full() {
                            b.add_square(hw, &(x.clone() - da));
                            b.add_square(hw, &(x - db));
                        } else {
                            let top = if ising { 2 } else { 1 };
                            b.add_square(w, &(x.clone() - da));
                            b.add_product(w, &x, &(LinearForm::constant(top) - db));
                        }
                    }
                }
            }
        }
    }

    /// Kernel model and layout.
    pub fn build(&self) -> Result<KernelHandle, KernelError> {
        let mut b = ExpressionBuilder::new(self.kind, self.num_vars());
        self.emit(&mut b, 1);
        let model = b.finalize()?;
        Ok(KernelHandle { spec: *self, model, layout: self.layout(), optimal_value: self.optimal_value() })
    }

    fn check_dims(&self, p: &PartialPermutation) -> Result<(), KernelError> {
        if p.m() != self.m || p.n() != self.n {
            return Err(KernelError::InconsistentDimensions { m: self.m, n: self.n, got_m: p.m(), got_n: p.n() });
        }
        Ok(())
    }

    /// Assignment at which the kernel takes its optimal value. Positions not in the
    /// image of a partial permutation get an all-hot column of `B`.
    pub fn encode(&self, p: &PartialPermutation) -> Result<Vec<i8>, KernelError> {
        self.check_dims(p)?;
        let (hot, cold) = (self.kind.hot(), self.kind.cold());
        let mut out = vec![cold; self.num_vars()];
        if let Some(a) = self.a_block() {
            for (i, &v) in p.values().iter().enumerate() {
                for j in 0..v {
                    out[a.index(i, j)] = hot;
                }
            }
        }
        if let Some(b) = self.b_block() {
            for (j, inv) in p.inverse().into_iter().enumerate() {
                let depth = inv.unwrap_or(b.rows);
                for i in 0..depth {
                    out[b.index(i, j)] = hot;
                }
            }
        }
        if let Some(x) = self.x_block() {
            for (i, &v) in p.values().iter().enumerate() {
                out[x.index(i, v)] = hot;
            }
        }
        Ok(out)
    }

    /// Reads the permutation back, checking every structural condition.
    pub fn decode(&self, assignment: &[i8]) -> Decoded {
        use InfeasibleReason as R;
        if assignment.len() != self.num_vars() {
            return Decoded::Infeasible(R::Malformed(format!(
                "{} values for {} variables",
                assignment.len(),
                self.num_vars()
            )));
        }
        if let Some(k) = assignment.iter().position(|&v| !self.kind.admits(v)) {
            return Decoded::Infeasible(R::Malformed(format!("value {} at {k}", assignment[k])));
        }
        let is_hot = |v: usize| assignment[v] == self.kind.hot();
        let (m, n) = (self.m, self.n);
        let mut values = vec![0usize; m];

        if let Some(a) = self.a_block() {
            for (i, slot) in values.iter_mut().enumerate().take(a.rows) {
                let run = (0..a.cols).take_while(|&j| is_hot(a.index(i, j))).count();
                if (run..a.cols).any(|j| is_hot(a.index(i, j))) {
                    return Decoded::Infeasible(R::RowNotDomainWall(i));
                }
                *slot = run;
            }
            if let Some(b) = self.b_block() {
                let mut p = vec![0usize; n];
                for (j, slot) in p.iter_mut().enumerate() {
                    let run = (0..b.rows).take_while(|&i| is_hot(b.index(i, j))).count();
                    if (run..b.rows).any(|i| is_hot(b.index(i, j))) {
                        return Decoded::Infeasible(R::ColumnNotDomainWall(j));
                    }
                    *slot = run;
                }
                for (i, &v) in values.iter().enumerate() {
                    if p[v] != i {
                        return Decoded::Infeasible(R::DualMismatch { row: i });
                    }
                }
            }
        }

        if let Some(x) = self.x_block() {
            if self.technique == Technique::OneHot {
                for (i, slot) in values.iter_mut().enumerate() {
                    let hot: Vec<usize> = (0..n).filter(|&j| is_hot(x.index(i, j))).collect();
                    match hot.as_slice() {
                        [j] => *slot = *j,
                        _ => return Decoded::Infeasible(R::RowNotOneHot(i)),
                    }
                }
                for j in 0..n {
                    let count = (0..m).filter(|&i| is_hot(x.index(i, j))).count();
                    if self.is_full() && count != 1 {
                        return Decoded::Infeasible(R::ColumnNotOneHot(j));
                    }
                    if count > 1 {
                        return Decoded::Infeasible(R::ColumnHasSeveralHot(j));
                    }
                }
            } else {
                for (i, &v) in values.iter().enumerate() {
                    if let Some(j) = (0..n).find(|&j| is_hot(x.index(i, j)) != (j == v)) {
                        return Decoded::Infeasible(R::OneHotMismatch { row: i, col: j });
                    }
                }
            }
        }

        let mut seen = vec![false; n];
        for &v in &values {
            if seen[v] {
                return Decoded::Infeasible(R::DuplicateValue(v));
            }
            seen[v] = true;
        }
        Decoded::Feasible(PartialPermutation::new(values, n).expect("checked injective"))
    }
}

/// A built kernel.
#[derive(Clone, Debug)]
pub struct KernelHandle {
    pub spec: KernelSpec,
    pub model: QuadraticModel,
    pub layout: VariableLayout,
    pub optimal_value: Rational,
}

impl KernelHandle {
    pub fn technique(&self) -> Technique {
        self.spec.technique
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn kind(&self) -> Kind {
        self.spec.kind
    }
}

pub fn build_kernel(technique: Technique, m: usize, n: usize, kind: Kind) -> Result<KernelHandle, KernelError> {
    KernelSpec::new(technique, m, n, kind)?.build()
}

pub fn encode_permutation(handle: &KernelHandle, p: &PartialPermutation) -> Result<Vec<i8>, KernelError> {
    handle.spec.encode(p)
}

pub fn decode_permutation(handle: &KernelHandle, assignment: &[i8]) -> Decoded {
    handle.spec.decode(assignment)
}
