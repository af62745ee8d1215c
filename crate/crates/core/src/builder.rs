//! Symbolic expansion of weighted squares and products of linear forms.
//!
//! Coefficients are accumulated as integers over one shared denominator, so
//! half-weighted squares expand exactly. `x^2 = x` in QUBO mode, `s^2 = 1` in Ising mode.

use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use crate::model::{Coupling, Kind, ModelError, QuadraticModel, Rational};

/// `constant + sum(coef * var)` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    constant: i64,
    terms: Vec<(usize, i64)>,
}

impl LinearForm {
    pub fn constant(c: i64) -> Self {
        LinearForm { constant: c, terms: Vec::new() }
    }

    pub fn var(v: usize) -> Self {
        LinearForm { constant: 0, terms: vec![(v, 1)] }
    }

    /// Sum of the given variables, each with coefficient 1.
    pub fn sum<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        LinearForm { constant: 0, terms: vars.into_iter().map(|v| (v, 1)).collect() }
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn terms(&self) -> &[(usize, i64)] {
        &self.terms
    }

    /// Sorts by variable, merges repeats and drops zero coefficients.
    pub fn simplified(mut self) -> Self {
        self.terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        self.terms = out;
        self
    }

    /// Value at an assignment.
    pub fn eval(&self, assignment: &[i8]) -> i64 {
        self.constant + self.terms.iter().map(|&(v, c)| c * assignment[v] as i64).sum::<i64>()
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(mut self, rhs: LinearForm) -> LinearForm {
        self.constant += rhs.constant;
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + (-rhs)
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self * -1
    }
}

impl Mul<i64> for LinearForm {
    type Output = LinearForm;
    fn mul(mut self, k: i64) -> LinearForm {
        self.constant *= k;
        for t in &mut self.terms {
            t.1 *= k;
        }
        self
    }
}

impl Add<i64> for LinearForm {
    type Output = LinearForm;
    fn add(mut self, c: i64) -> LinearForm {
        self.constant += c;
        self
    }
}

impl Sub<i64> for LinearForm {
    type Output = LinearForm;
    fn sub(self, c: i64) -> LinearForm {
        self + (-c)
    }
}

fn pair_key(i: usize, j: usize) -> u64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    ((a as u64) << 32) | b as u64
}

/// Accumulates terms, then [`finalize`](ExpressionBuilder::finalize)s into a model.
/// Overflow is sticky and reported at finalize.
#[derive(Debug)]
pub struct ExpressionBuilder {
    kind: Kind,
    num_vars: usize,
    denom: i64,
    constant: i128,
    linear: Vec<i128>,
    quad: Vec<(u64, i64)>,
    merged: usize,
    overflow: bool,
}

impl ExpressionBuilder {
    pub fn new(kind: Kind, num_vars: usize) -> Self {
        assert!(num_vars <= u32::MAX as usize, "too many variables");
        ExpressionBuilder {
            kind,
            num_vars,
            denom: 1,
            constant: 0,
            linear: vec![0; num_vars],
            quad: Vec::new(),
            merged: 0,
            overflow: false,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Hint for the number of raw quadratic contributions still to come.
    pub fn reserve(&mut self, additional: usize) {
        self.quad.reserve(additional);
    }

    /// Returns `w` in units of `1/denom`, widening the denominator when needed.
    fn scaled(&mut self, w: Rational) -> i64 {
        let d = *w.denom();
        if self.denom % d != 0 {
            let new = self.denom.lcm(&d);
            let f = new / self.denom;
            self.constant *= f as i128;
            for l in &mut self.linear {
                *l *= f as i128;
            }
            for q in &mut self.quad {
                match q.1.checked_mul(f) {
                    Some(v) => q.1 = v,
                    None => self.overflow = true,
                }
            }
            self.denom = new;
        }
        match w.numer().checked_mul(self.denom / d) {
            Some(v) => v,
            None => {
                self.overflow = true;
                0
            }
        }
    }

    fn push_quad(&mut self, i: usize, j: usize, v: i128) {
        if v == 0 {
            return;
        }
        match i64::try_from(v) {
            Ok(v) => self.quad.push((pair_key(i, j), v)),
            Err(_) => self.overflow = true,
        }
        if self.quad.len() > 2 * self.merged + (1 << 22) {
            self.compact();
        }
    }

    /// Folds `c * v_i * v_i`.
    fn push_diag(&mut self, v: usize, c: i128) {
        match self.kind {
            Kind::Qubo => self.linear[v] += c,
            Kind::Ising => self.constant += c,
        }
    }

    fn compact(&mut self) {
        self.quad.sort_unstable_by_key(|t| t.0);
        let mut w = 0usize;
        for r in 0..self.quad.len() {
            let (k, v) = self.quad[r];
            if w > 0 && self.quad[w - 1].0 == k {
                match self.quad[w - 1].1.checked_add(v) {
                    Some(s) => self.quad[w - 1].1 = s,
                    None => self.overflow = true,
                }
            } else {
                self.quad[w] = (k, v);
                w += 1;
            }
        }
        self.quad.truncate(w);
        self.quad.retain(|t| t.1 != 0);
        self.merged = self.quad.len();
    }

    pub fn add_constant(&mut self, w: Rational) {
        let s = self.scaled(w);
        self.constant += s as i128;
    }

    pub fn add_linear(&mut self, v: usize, w: Rational) {
        let s = self.scaled(w);
        self.linear[v] += s as i128;
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, w: Rational) {
        let s = self.scaled(w) as i128;
        if i == j {
            self.push_diag(i, s);
        } else {
            self.push_quad(i, j, s);
        }
    }

    /// Adds `w * f^2`.
    pub fn add_square(&mut self, w: Rational, f: &LinearForm) {
        let f = f.clone().simplified();
        let s = self.scaled(w) as i128;
        let c0 = f.constant as i128;
        self.constant += s * c0 * c0;
        for (p, &(v, c)) in f.terms.iter().enumerate() {
            let c = c as i128;
            self.linear[v] += s * 2 * c0 * c;
            self.push_diag(v, s * c * c);
            for &(u, d) in &f.terms[p + 1..] {
                self.push_quad(v, u, s * 2 * c * d as i128);
            }
        }
    }

    /// Adds `w * f * g`.
    pub fn add_product(&mut self, w: Rational, f: &LinearForm, g: &LinearForm) {
        let f = f.clone().simplified();
        let g = g.clone().simplified();
        let s = self.scaled(w) as i128;
        let (f0, g0) = (f.constant as i128, g.constant as i128);
        self.constant += s * f0 * g0;
        for &(v, c) in &f.terms {
            self.linear[v] += s * c as i128 * g0;
        }
        for &(u, d) in &g.terms {
            self.linear[u] += s * d as i128 * f0;
        }
        for &(v, c) in &f.terms {
            for &(u, d) in &g.terms {
                let x = s * c as i128 * d as i128;
                if u == v {
                    self.push_diag(v, x);
                } else {
                    self.push_quad(v, u, x);
                }
            }
        }
    }

    /// Adds `w * model` (same kind and variable count).
    pub fn add_model(&mut self, w: i64, model: &QuadraticModel) {
        assert_eq!(model.kind(), self.kind, "kind mismatch");
        assert_eq!(model.num_vars(), self.num_vars, "size mismatch");
        // The offset may widen the denominator, so scale it first.
        let off_scaled = self.scaled(model.offset() * w);
        self.constant += off_scaled as i128;
        let s = self.scaled(Rational::from_integer(w)) as i128;
        for &(v, c) in model.linear() {
            self.linear[v as usize] += s * c as i128;
        }
        self.quad.reserve(model.quadratic().len());
        for c in model.quadratic() {
            self.push_quad(c.i as usize, c.j as usize, s * c.weight as i128);
        }
    }

    /// Merges like terms, drops zeros and checks integrality.
    pub fn finalize(mut self) -> Result<QuadraticModel, ModelError> {
        self.compact();
        if self.overflow {
            return Err(ModelError::Overflow);
        }
        let d = self.denom;
        let mut linear = Vec::new();
        for (v, &c) in self.linear.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c % d as i128 != 0 {
                return Err(ModelError::NonIntegerCoefficient {
                    term: format!("x{v}"),
                    value: rational_from_wide(c, d)?,
                });
            }
            linear.push((v as u32, i64::try_from(c / d as i128).map_err(|_| ModelError::Overflow)?));
        }
        let mut quadratic = Vec::with_capacity(self.quad.len());
        for &(k, c) in &self.quad {
            let (i, j) = ((k >> 32) as u32, k as u32);
            if c % d != 0 {
                return Err(ModelError::NonIntegerCoefficient {
                    term: format!("x{i}*x{j}"),
                    value: Rational::new(c, d),
                });
            }
            quadratic.push(Coupling { i, j, weight: c / d });
        }
        drop(self.quad);
        let offset = rational_from_wide(self.constant, d)?;
        Ok(QuadraticModel::from_parts(self.kind, self.num_vars, linear, quadratic, offset))
    }
}

fn rational_from_wide(n: i128, d: i64) -> Result<Rational, ModelError> {
    let g = n.gcd(&(d as i128)).max(1);
    let num = i64::try_from(n / g).map_err(|_| ModelError::Overflow)?;
    Ok(Rational::new(num, d / g as i64))
}
