//! Sparse integer-coefficient QUBO / Ising models with an exact rational offset.

use std::fmt;

use num_integer::Integer;
use num_traits::CheckedAdd;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::ExpressionBuilder;
use crate::layout::Label;

/// Exact rational used for offsets and energies.
pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Qubo,
    Ising,
}

impl Kind {
    /// Value of a hot (selected) cell.
    pub fn hot(self) -> i8 {
        1
    }

    /// Value of a cold cell: 0 for bits, -1 for spins.
    pub fn cold(self) -> i8 {
        match self {
            Kind::Qubo => 0,
            Kind::Ising => -1,
        }
    }

    pub fn admits(self, v: i8) -> bool {
        v == self.hot() || v == self.cold()
    }

    pub fn other(self) -> Kind {
        match self {
            Kind::Qubo => Kind::Ising,
            Kind::Ising => Kind::Qubo,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Qubo => "qubo",
            Kind::Ising => "ising",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qubo" => Ok(Kind::Qubo),
            "ising" => Ok(Kind::Ising),
            other => Err(format!("unknown kind '{other}' (expected qubo or ising)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("coefficient of {term} is not an integer ({value})")]
    NonIntegerCoefficient { term: String, value: Rational },
    #[error("coefficient overflow")]
    Overflow,
    #[error("label {0} is used twice")]
    LabelCollision(Label),
    #[error("assignment has {got} values, model has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {value} at index {index} is not a valid {kind} value")]
    DomainMismatch { index: usize, value: i8, kind: Kind },
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
}

/// One stored quadratic term, always with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coupling {
    pub i: u32,
    pub j: u32,
    pub weight: i64,
}

/// Immutable sparse model. Linear terms are sorted by index, couplings by `(i, j)`.
/// No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticModel {
    kind: Kind,
    num_vars: usize,
    linear: Vec<(u32, i64)>,
    quadratic: Vec<Coupling>,
    offset: Rational,
}

/// Result of switching between bit and spin form: `scale * E_source = E_target + shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conversion {
    pub model: QuadraticModel,
    pub scale: Rational,
    pub shift: Rational,
}

impl QuadraticModel {
    /// Assembles a model from already merged, sorted, nonzero terms.
    pub(crate) fn from_parts(
        kind: Kind,
        num_vars: usize,
        linear: Vec<(u32, i64)>,
        quadratic: Vec<Coupling>,
        offset: Rational,
    ) -> Self {
        debug_assert!(linear.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(quadratic.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        debug_assert!(quadratic.iter().all(|c| c.i < c.j && c.weight != 0));
        QuadraticModel { kind, num_vars, linear, quadratic, offset }
    }

    /// Builds a model from arbitrary term lists. Duplicates are summed, `(i, i)`
    /// pairs fold by `x^2 = x` or `s^2 = 1`, and zeros are dropped.
    pub fn from_terms<L, Q>(
        kind: Kind,
        num_vars: usize,
        linear: L,
        quadratic: Q,
        offset: Rational,
    ) -> Result<Self, ModelError>
    where
        L: IntoIterator<Item = (usize, i64)>,
        Q: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut b = ExpressionBuilder::new(kind, num_vars);
        b.add_constant(offset);
        for (v, w) in linear {
            if v >= num_vars {
                return Err(ModelError::VariableOutOfRange { index: v, num_vars });
            }
            b.add_linear(v, Rational::from_integer(w));
        }
        for (i, j, w) in quadratic {
            for v in [i, j] {
                if v >= num_vars {
                    return Err(ModelError::VariableOutOfRange { index: v, num_vars });
                }
            }
            b.add_quadratic(i, j, Rational::from_integer(w));
        }
        b.finalize()
    }

    pub fn empty(kind: Kind, num_vars: usize) -> Self {
        QuadraticModel::from_parts(kind, num_vars, Vec::new(), Vec::new(), Rational::from_integer(0))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn linear(&self) -> &[(u32, i64)] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Coupling] {
        &self.quadratic
    }

    pub fn offset(&self) -> Rational {
        self.offset
    }

    pub fn linear_coefficient(&self, v: usize) -> i64 {
        match self.linear.binary_search_by_key(&(v as u32), |t| t.0) {
            Ok(pos) => self.linear[pos].1,
            Err(_) => 0,
        }
    }

    pub fn quadratic_coefficient(&self, i: usize, j: usize) -> i64 {
        let (a, b) = if i < j { (i as u32, j as u32) } else { (j as u32, i as u32) };
        match self.quadratic.binary_search_by_key(&(a, b), |c| (c.i, c.j)) {
            Ok(pos) => self.quadratic[pos].weight,
            Err(_) => 0,
        }
    }

    /// Largest absolute coefficient over linear and quadratic terms (0 for an empty model).
    pub fn max_abs_coefficient(&self) -> i64 {
        let l = self.linear.iter().map(|t| t.1.abs());
        let q = self.quadratic.iter().map(|c| c.weight.abs());
        l.chain(q).max().unwrap_or(0)
    }

    pub fn check_assignment(&self, assignment: &[i8]) -> Result<(), ModelError> {
        if assignment.len() != self.num_vars {
            return Err(ModelError::LengthMismatch { expected: self.num_vars, got: assignment.len() });
        }
        if let Some((index, &value)) = assignment.iter().enumerate().find(|(_, &v)| !self.kind.admits(v)) {
            return Err(ModelError::DomainMismatch { index, value, kind: self.kind });
        }
        Ok(())
    }

    /// Energy without the offset, as a wide integer. Assumes a checked assignment.
    pub(crate) fn term_energy(&self, assignment: &[i8]) -> i128 {
        let mut e: i128 = 0;
        for &(v, w) in &self.linear {
            e += w as i128 * assignment[v as usize] as i128;
        }
        for c in &self.quadratic {
            e += c.weight as i128 * (assignment[c.i as usize] * assignment[c.j as usize]) as i128;
        }
        e
    }

    /// Exact energy (QUBO) or Hamiltonian (Ising) of an assignment.
    pub fn evaluate(&self, assignment: &[i8]) -> Result<Rational, ModelError> {
        self.check_assignment(assignment)?;
        let e = i64::try_from(self.term_energy(assignment)).map_err(|_| ModelError::Overflow)?;
        Rational::from_integer(e).checked_add(&self.offset).ok_or(ModelError::Overflow)
    }

    /// Switches to the other kind. The target has offset 0 and coefficients with
    /// no common factor; `scale` is the smallest positive multiplier doing that.
    pub fn convert(&self) -> Result<Conversion, ModelError> {
        let n = self.num_vars;
        // Work in units of a common denominator so every intermediate is an integer.
        // QUBO -> Ising: x = (s + 1) / 2, everything times 4.
        // Ising -> QUBO: s = 2x - 1, no scaling needed.
        let mut lin = vec![0i128; n];
        let mut quad: Vec<(u32, u32, i128)> = Vec::with_capacity(self.quadratic.len());
        let mut constant = Ratio::<i128>::from_integer(0);
        let offset = Ratio::new(*self.offset.numer() as i128, *self.offset.denom() as i128);
        let denom: i128 = match self.kind {
            Kind::Qubo => {
                constant += offset * 4;
                for &(v, w) in &self.linear {
                    lin[v as usize] += 2 * w as i128;
                    constant += Ratio::from_integer(2 * w as i128);
                }
                for c in &self.quadratic {
                    let w = c.weight as i128;
                    quad.push((c.i, c.j, w));
                    lin[c.i as usize] += w;
                    lin[c.j as usize] += w;
                    constant += Ratio::from_integer(w);
                }
                4
            }
            Kind::Ising => {
                constant += offset;
                for &(v, w) in &self.linear {
                    lin[v as usize] += 2 * w as i128;
                    constant -= Ratio::from_integer(w as i128);
                }
                for c in &self.quadratic {
                    let w = c.weight as i128;
                    quad.push((c.i, c.j, 4 * w));
                    lin[c.i as usize] -= 2 * w;
                    lin[c.j as usize] -= 2 * w;
                    constant += Ratio::from_integer(w);
                }
                1
            }
        };
        // source = (sum(target terms) + constant) / denom; divide target terms by g.
        let g = lin
            .iter()
            .copied()
            .chain(quad.iter().map(|t| t.2))
            .fold(0i128, |acc, v| acc.gcd(&v));
        let target_kind = self.kind.other();
        if g == 0 {
            let shift = narrow(constant / denom)?;
            let model = QuadraticModel::empty(target_kind, n);
            return Ok(Conversion { model, scale: Rational::from_integer(1), shift });
        }
        let to_i64 = |v: i128| i64::try_from(v / g).map_err(|_| ModelError::Overflow);
        let mut linear = Vec::new();
        for (v, &w) in lin.iter().enumerate() {
            if w != 0 {
                linear.push((v as u32, to_i64(w)?));
            }
        }
        let mut quadratic = Vec::with_capacity(quad.len());
        for (i, j, w) in quad {
            if w != 0 {
                quadratic.push(Coupling { i, j, weight: to_i64(w)? });
            }
        }
        // source * denom / g = target + constant / g
        let scale = narrow(Ratio::new(denom, g))?;
        let shift = narrow(constant / g)?;
        let model = QuadraticModel::from_parts(target_kind, n, linear, quadratic, Rational::from_integer(0));
        Ok(Conversion { model, scale, shift })
    }

    /// Divides every coefficient and the offset by the gcd of the coefficients.
    /// Returns the model and the divisor (1 when there is nothing to divide).
    pub fn normalize(&self) -> (QuadraticModel, i64) {
        let g = self
            .linear
            .iter()
            .map(|t| t.1)
            .chain(self.quadratic.iter().map(|c| c.weight))
            .fold(0i64, |acc, v| acc.gcd(&v));
        if g <= 1 {
            return (self.clone(), 1);
        }
        let linear = self.linear.iter().map(|&(v, w)| (v, w / g)).collect();
        let quadratic = self.quadratic.iter().map(|c| Coupling { weight: c.weight / g, ..*c }).collect();
        let offset = self.offset / g;
        (QuadraticModel::from_parts(self.kind, self.num_vars, linear, quadratic, offset), g)
    }
}

fn narrow(r: Ratio<i128>) -> Result<Rational, ModelError> {
    let n = i64::try_from(*r.numer()).map_err(|_| ModelError::Overflow)?;
    let d = i64::try_from(*r.denom()).map_err(|_| ModelError::Overflow)?;
    Ok(Rational::new(n, d))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn six_var_qubo() -> QuadraticModel {
        let lin = [(0, -2), (1, -1), (2, 2), (5, 4)];
        let quad = [(0, 1, 2), (0, 3, -1), (0, 4, -2), (1, 2, -1), (1, 5, 1), (2, 5, 3), (3, 4, -2), (4, 5, -2)];
        QuadraticModel::from_terms(Kind::Qubo, 6, lin, quad, r(0, 1)).unwrap()
    }

    #[test]
    fn duplicate_terms_merge_and_zeros_drop() {
        let m = QuadraticModel::from_terms(Kind::Qubo, 3, [(0, 2), (0, -2), (1, 1)], [(2, 0, 3), (0, 2, 1), (1, 1, 4)], r(0, 1))
            .unwrap();
        assert_eq!(m.linear(), &[(1, 5)]);
        assert_eq!(m.quadratic(), &[Coupling { i: 0, j: 2, weight: 4 }]);
    }

    #[test]
    fn ising_self_product_folds_into_offset() {
        let m = QuadraticModel::from_terms(Kind::Ising, 1, [], [(0, 0, 3)], r(1, 2)).unwrap();
        assert!(m.quadratic().is_empty());
        assert_eq!(m.offset(), r(7, 2));
    }

    #[test]
    fn evaluate_rejects_bad_assignments() {
        let m = QuadraticModel::empty(Kind::Qubo, 2);
        assert_eq!(m.evaluate(&[0]), Err(ModelError::LengthMismatch { expected: 2, got: 1 }));
        assert!(matches!(m.evaluate(&[0, -1]), Err(ModelError::DomainMismatch { index: 1, .. })));
        let s = QuadraticModel::empty(Kind::Ising, 1);
        assert!(matches!(s.evaluate(&[0]), Err(ModelError::DomainMismatch { .. })));
    }

    #[test]
    fn zero_assignment_gives_offset() {
        let m = QuadraticModel::from_terms(Kind::Qubo, 2, [(0, 5)], [(0, 1, -3)], r(3, 2)).unwrap();
        assert_eq!(m.evaluate(&[0, 0]).unwrap(), r(3, 2));
    }

    #[test]
    fn six_var_qubo_optimum_is_minus_seven() {
        let m = six_var_qubo();
        assert_eq!(m.evaluate(&[1, 0, 0, 1, 1, 0]).unwrap(), r(-7, 1));
    }

    #[test]
    fn six_var_conversion_is_four_e_equals_h_plus_four() {
        let c = six_var_qubo().convert().unwrap();
        assert_eq!((c.scale, c.shift), (r(4, 1), r(4, 1)));
        assert_eq!(c.model.linear(), &[(0, -5), (2, 6), (3, -3), (4, -6), (5, 10)]);
        assert_eq!(c.model.evaluate(&[1, -1, -1, 1, 1, -1]).unwrap(), r(-32, 1));
    }

    #[test]
    fn zero_model_converts_to_zero_model() {
        let c = QuadraticModel::empty(Kind::Qubo, 3).convert().unwrap();
        assert_eq!(c.scale, r(1, 1));
        assert_eq!(c.shift, r(0, 1));
        assert_eq!(c.model, QuadraticModel::empty(Kind::Ising, 3));
    }

    #[test]
    fn single_bit_converts_with_smallest_scale() {
        let m = QuadraticModel::from_terms(Kind::Qubo, 1, [(0, 1)], [], r(0, 1)).unwrap();
        let c = m.convert().unwrap();
        assert_eq!(c.model.linear(), &[(0, 1)]);
        for (x, s) in [(0i8, -1i8), (1, 1)] {
            let e = m.evaluate(&[x]).unwrap();
            let h = c.model.evaluate(&[s]).unwrap();
            assert_eq!(c.scale * e, h + c.shift);
        }
    }

    #[test]
    fn normalize_divides_common_factor() {
        let m = QuadraticModel::from_terms(Kind::Qubo, 2, [(0, 4)], [(0, 1, -6)], r(2, 1)).unwrap();
        let (n, g) = m.normalize();
        assert_eq!(g, 2);
        assert_eq!(n.linear(), &[(0, 2)]);
        assert_eq!(n.offset(), r(1, 1));
    }

    #[test]
    fn rational_text_round_trip() {
        for v in [r(7, 2), r(-3, 1), r(0, 1)] {
            assert_eq!(parse_rational(&format_rational(&v)), Some(v));
        }
        assert_eq!(parse_rational("1/0"), None);
    }
}
