//! One-hot, zero-one-hot and domain-wall encodings of a single integer.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::builder::{ExpressionBuilder, LinearForm};
use crate::layout::{Label, MatrixId, VariableLayout};
use crate::model::{Kind, QuadraticModel, Rational};
use crate::stats::Diameter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    OneHot,
    ZeroOneHot,
    DomainWall,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::OneHot, Scheme::ZeroOneHot, Scheme::DomainWall];

    /// Number of values representable with `k` bits.
    pub fn value_count(self, k: usize) -> usize {
        match self {
            Scheme::OneHot => k,
            Scheme::ZeroOneHot | Scheme::DomainWall => k + 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::OneHot => "one-hot",
            Scheme::ZeroOneHot => "zero-one-hot",
            Scheme::DomainWall => "domain-wall",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VectorValue {
    Int(usize),
    /// The undefined value of an all-cold zero-one-hot vector.
    Phi,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("vector length must be at least 1")]
    InvalidK,
    #[error("not a valid {0} vector")]
    NotAValidVector(Scheme),
    #[error("value {value:?} cannot be represented by a {scheme} vector of length {k}")]
    OutOfRange { scheme: Scheme, value: VectorValue, k: usize },
}

/// Energy model whose minimizers are exactly the valid vectors of `scheme`.
pub fn build_vector_model(scheme: Scheme, k: usize, kind: Kind) -> Result<(QuadraticModel, VariableLayout), EncodingError> {
    if k == 0 {
        return Err(EncodingError::InvalidK);
    }
    let k64 = k as i64;
    let half = Rational::new(1, 2);
    let one = Rational::from_integer(1);
    let mut layout = VariableLayout::new();
    layout.push_matrix(MatrixId::Flat, 1, k).expect("fresh layout");
    let mut b = ExpressionBuilder::new(kind, k);
    let all = LinearForm::sum(0..k);
    match (scheme, kind) {
        (Scheme::OneHot, Kind::Qubo) => b.add_square(one, &(LinearForm::constant(1) - all)),
        (Scheme::OneHot, Kind::Ising) => b.add_square(half, &(all + (k64 - 2))),
        (Scheme::ZeroOneHot, Kind::Qubo) => b.add_product(half, &all, &(all.clone() - 1)),
        (Scheme::ZeroOneHot, Kind::Ising) => b.add_product(half, &(all.clone() + k64), &(all + (k64 - 2))),
        (Scheme::DomainWall, _) => {
            let hot = kind.hot() as i64;
            let cold = kind.cold() as i64;
            layout.add_guard(Label::new(MatrixId::Flat, 0, -1), kind.hot()).expect("guard");
            layout.add_guard(Label::new(MatrixId::Flat, 0, k64), kind.cold()).expect("guard");
            let cell = |i: i64| -> LinearForm {
                if i < 0 {
                    LinearForm::constant(hot)
                } else if i >= k64 {
                    LinearForm::constant(cold)
                } else {
                    LinearForm::var(i as usize)
                }
            };
            for i in 0..=k64 {
                b.add_square(half, &(cell(i - 1) - cell(i)));
            }
        }
    }
    let model = b.finalize().expect("vector models have integer coefficients");
    Ok((model, layout))
}

pub fn decode_vector(scheme: Scheme, values: &[i8]) -> Result<VectorValue, EncodingError> {
    let hot: Vec<usize> = values.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i).collect();
    let invalid = Err(EncodingError::NotAValidVector(scheme));
    match scheme {
        Scheme::OneHot => match hot.as_slice() {
            [p] => Ok(VectorValue::Int(*p)),
            _ => invalid,
        },
        Scheme::ZeroOneHot => match hot.as_slice() {
            [] => Ok(VectorValue::Phi),
            [p] => Ok(VectorValue::Int(*p)),
            _ => invalid,
        },
        Scheme::DomainWall => {
            let run = values.iter().take_while(|&&v| v == 1).count();
            if hot.len() == run {
                Ok(VectorValue::Int(run))
            } else {
                invalid
            }
        }
    }
}

/// Vector of `k` values in the given kind's alphabet.
pub fn encode_vector(scheme: Scheme, value: VectorValue, k: usize, kind: Kind) -> Result<Vec<i8>, EncodingError> {
    let out_of_range = Err(EncodingError::OutOfRange { scheme, value, k });
    let mut v = vec![kind.cold(); k];
    match (scheme, value) {
        (Scheme::OneHot | Scheme::ZeroOneHot, VectorValue::Int(p)) if p < k => v[p] = kind.hot(),
        (Scheme::ZeroOneHot, VectorValue::Phi) => {}
        (Scheme::DomainWall, VectorValue::Int(p)) if p <= k => v[..p].fill(kind.hot()),
        _ => return out_of_range,
    }
    Ok(v)
}

/// Every value the scheme can represent with `k` bits.
pub fn vector_values(scheme: Scheme, k: usize) -> Vec<VectorValue> {
    match scheme {
        Scheme::OneHot => (0..k).map(VectorValue::Int).collect(),
        Scheme::ZeroOneHot => (0..k).map(VectorValue::Int).chain([VectorValue::Phi]).collect(),
        Scheme::DomainWall => (0..=k).map(VectorValue::Int).collect(),
    }
}

/// Tabulated statistics of a vector model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorClosedForm {
    pub linear_count: usize,
    pub linear_coeffs: BTreeSet<i64>,
    pub quadratic_count: usize,
    pub quadratic_coeffs: BTreeSet<i64>,
    pub diameter: Diameter,
    pub offset: Rational,
    pub optimal: Rational,
}

/// The published table of vector-model statistics, as printed.
pub fn vector_closed_form(scheme: Scheme, kind: Kind, k: usize) -> VectorClosedForm {
    let ki = k as i64;
    let pairs = k * k.saturating_sub(1) / 2;
    let r = Rational::from_integer;
    let set = |v: &[i64]| v.iter().copied().collect::<BTreeSet<_>>();
    let (lc, ls, qc, qs, diam, off, opt) = match (scheme, kind) {
        (Scheme::OneHot, Kind::Qubo) => (k, set(&[-1]), pairs, set(&[2]), 1, r(1), r(0)),
        (Scheme::ZeroOneHot, Kind::Qubo) => (0, set(&[]), pairs, set(&[1]), 1, r(0), r(0)),
        (Scheme::DomainWall, Kind::Qubo) => (k - 1, set(&[1]), k - 1, set(&[-1]), k - 1, Rational::new(1, 2), Rational::new(1, 2)),
        (Scheme::OneHot, Kind::Ising) => {
            (k, set(&[ki - 2]), pairs, set(&[1]), 1, Rational::new(ki * ki - 3 * ki + 4, 2), r(0))
        }
        (Scheme::ZeroOneHot, Kind::Ising) => (k, set(&[ki - 1]), pairs, set(&[1]), 1, Rational::new(ki * ki - ki, 2), r(0)),
        (Scheme::DomainWall, Kind::Ising) => (2, set(&[-1, 1]), k - 1, set(&[-1]), k - 1, r(ki + 1), r(2)),
    };
    VectorClosedForm {
        linear_count: lc,
        linear_coeffs: ls,
        quadratic_count: qc,
        quadratic_coeffs: qs,
        diameter: Diameter::Finite(diam),
        offset: off,
        optimal: opt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ModelStats;

    #[test]
    fn one_hot_qubo_k4() {
        let (m, _) = build_vector_model(Scheme::OneHot, 4, Kind::Qubo).unwrap();
        let s = ModelStats::of(&m);
        assert_eq!((s.quadratic_term_count, s.linear_term_count), (6, 4));
        assert_eq!(s.quadratic_coeff_set, BTreeSet::from([2]));
        assert_eq!(s.linear_coeff_set, BTreeSet::from([-1]));
        assert_eq!(s.offset, Rational::from_integer(1));
        assert_eq!(s.diameter, Some(Diameter::Finite(1)));
    }

    #[test]
    fn domain_wall_ising_k4() {
        let (m, layout) = build_vector_model(Scheme::DomainWall, 4, Kind::Ising).unwrap();
        assert_eq!(m.linear(), &[(0, -1), (3, 1)]);
        assert_eq!(m.quadratic().iter().map(|c| (c.i, c.j, c.weight)).collect::<Vec<_>>(), [(0, 1, -1), (1, 2, -1), (2, 3, -1)]);
        assert_eq!(m.offset(), Rational::from_integer(5));
        assert_eq!(layout.len(), 4);
        assert_eq!(layout.guards().count(), 2);
        assert_eq!(m.evaluate(&[1, 1, -1, -1]).unwrap(), Rational::from_integer(2));
    }

    #[test]
    fn zero_one_hot_qubo_k3() {
        let (m, _) = build_vector_model(Scheme::ZeroOneHot, 3, Kind::Qubo).unwrap();
        assert!(m.linear().is_empty());
        assert_eq!(m.quadratic().len(), 3);
        assert!(m.quadratic().iter().all(|c| c.weight == 1));
        assert_eq!(m.offset(), Rational::from_integer(0));
    }

    #[test]
    fn k_zero_is_rejected() {
        assert_eq!(build_vector_model(Scheme::OneHot, 0, Kind::Qubo).unwrap_err(), EncodingError::InvalidK);
    }

    #[test]
    fn one_hot_k1_has_single_minimizer() {
        let (m, _) = build_vector_model(Scheme::OneHot, 1, Kind::Qubo).unwrap();
        assert!(m.quadratic().is_empty());
        assert_eq!(m.evaluate(&[1]).unwrap(), Rational::from_integer(0));
        assert_eq!(m.evaluate(&[0]).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_vector(Scheme::DomainWall, &[1, 1, 0, 0]), Ok(VectorValue::Int(2)));
        assert_eq!(decode_vector(Scheme::ZeroOneHot, &[0, 0, 0, 0]), Ok(VectorValue::Phi));
        assert_eq!(decode_vector(Scheme::DomainWall, &[0, 1, 0, 0]), Err(EncodingError::NotAValidVector(Scheme::DomainWall)));
        assert!(decode_vector(Scheme::OneHot, &[1, 1, 0, 0]).is_err());
        assert_eq!(decode_vector(Scheme::OneHot, &[-1, 1, -1]), Ok(VectorValue::Int(1)));
    }

    #[test]
    fn encode_examples() {
        let q = Kind::Qubo;
        assert_eq!(encode_vector(Scheme::DomainWall, VectorValue::Int(0), 4, q).unwrap(), [0, 0, 0, 0]);
        assert_eq!(encode_vector(Scheme::OneHot, VectorValue::Int(3), 4, q).unwrap(), [0, 0, 0, 1]);
        assert_eq!(encode_vector(Scheme::DomainWall, VectorValue::Int(4), 4, q).unwrap(), [1, 1, 1, 1]);
        assert!(encode_vector(Scheme::OneHot, VectorValue::Int(4), 4, q).is_err());
        assert!(encode_vector(Scheme::OneHot, VectorValue::Phi, 4, q).is_err());
    }

    #[test]
    fn round_trip_every_value() {
        for scheme in Scheme::ALL {
            for k in 1..6 {
                for v in vector_values(scheme, k) {
                    let bits = encode_vector(scheme, v, k, Kind::Ising).unwrap();
                    assert_eq!(decode_vector(scheme, &bits), Ok(v));
                }
            }
        }
    }
}
