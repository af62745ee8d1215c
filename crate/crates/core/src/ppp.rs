//! The particle placement problem: place `m` particles on `n` positions, paying a
//! potential per placement and an interaction per pair of placements.
//!
//! Interactions are keyed by canonical quartets `(i, j, i', j')` with `i < i'`, `j != j'`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{ExpressionBuilder, LinearForm};
use crate::io::{EncodingMeta, ModelFile};
use crate::kernels::{KernelError, KernelSpec, PartialPermutation, Technique};
use crate::layout::VariableLayout;
use crate::model::{Kind, ModelError, QuadraticModel, Rational};
use crate::solvers::Solution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PppError {
    #[error("need 1 <= m <= n, got m={m}, n={n}")]
    InvalidDimensions { m: usize, n: usize },
    #[error("placement ({i},{j}) outside {m}x{n}")]
    OutOfRange { i: usize, j: usize, m: usize, n: usize },
    #[error("({i},{j},{ip},{jp}) is not a consistent quartet")]
    InvalidQuartet { i: usize, j: usize, ip: usize, jp: usize },
    #[error("permutation of {got_m} of {got_n} does not fit an instance with m={m}, n={n}")]
    DimensionMismatch { m: usize, n: usize, got_m: usize, got_n: usize },
    #[error("{target:?} objective is not available for {technique}")]
    UnsupportedTarget { target: ObjectiveTarget, technique: Technique },
    #[error("penalty weight must be positive, got {0}")]
    InvalidLambda(i64),
    #[error("no consistent quartets exist for m={m}, n={n}")]
    DegenerateQ { m: usize, n: usize },
    #[error("bad instance file: {0}")]
    Parse(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Quartet = (u32, u32, u32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PppInstance {
    m: usize,
    n: usize,
    potentials: BTreeMap<(u32, u32), i64>,
    interactions: BTreeMap<Quartet, i64>,
    /// Constant added to every placement value to recover the source problem's objective.
    shift: i64,
}

impl PppInstance {
    pub fn new(m: usize, n: usize) -> Result<Self, PppError> {
        if m == 0 || m > n || n > u32::MAX as usize {
            return Err(PppError::InvalidDimensions { m, n });
        }
        Ok(PppInstance { m, n, potentials: BTreeMap::new(), interactions: BTreeMap::new(), shift: 0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn set_shift(&mut self, shift: i64) {
        self.shift = shift;
    }

    pub fn potentials(&self) -> &BTreeMap<(u32, u32), i64> {
        &self.potentials
    }

    pub fn interactions(&self) -> &BTreeMap<Quartet, i64> {
        &self.interactions
    }

    fn check(&self, i: usize, j: usize) -> Result<(), PppError> {
        if i >= self.m || j >= self.n {
            return Err(PppError::OutOfRange { i, j, m: self.m, n: self.n });
        }
        Ok(())
    }

    /// Adds `v` to `P[i][j]`.
    pub fn add_potential(&mut self, i: usize, j: usize, v: i64) -> Result<(), PppError> {
        self.check(i, j)?;
        accumulate(&mut self.potentials, (i as u32, j as u32), v);
        Ok(())
    }

    /// Adds `v` to the interaction of placements `(i, j)` and `(ip, jp)`, in either order.
    pub fn add_interaction(&mut self, i: usize, j: usize, ip: usize, jp: usize, v: i64) -> Result<(), PppError> {
        self.check(i, j)?;
        self.check(ip, jp)?;
        if i == ip || j == jp {
            return Err(PppError::InvalidQuartet { i, j, ip, jp });
        }
        let key = if i < ip { (i, j, ip, jp) } else { (ip, jp, i, j) };
        accumulate(&mut self.interactions, (key.0 as u32, key.1 as u32, key.2 as u32, key.3 as u32), v);
        Ok(())
    }

    /// `sum(|P|) + sum(|I|)`, saturating.
    pub fn total_weight(&self) -> i64 {
        self.potentials.values().chain(self.interactions.values()).fold(0i64, |acc, v| acc.saturating_add(v.saturating_abs()))
    }

    pub fn to_json(&self) -> String {
        let doc = PppJson {
            m: self.m,
            n: self.n,
            potentials: self.potentials.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            interactions: self.interactions.iter().map(|(&(i, j, ip, jp), &v)| (i, j, ip, jp, v)).collect(),
            shift: self.shift,
        };
        let mut s = serde_json::to_string(&doc).expect("instance serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PppError> {
        let doc: PppJson = serde_json::from_str(text).map_err(|e| PppError::Parse(format!("line {}: {e}", e.line())))?;
        let mut inst = PppInstance::new(doc.m, doc.n)?;
        for (i, j, v) in doc.potentials {
            inst.add_potential(i as usize, j as usize, v)?;
        }
        for (i, j, ip, jp, v) in doc.interactions {
            inst.add_interaction(i as usize, j as usize, ip as usize, jp as usize, v)?;
        }
        inst.shift = doc.shift;
        Ok(inst)
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, i64>, key: K, v: i64) {
    match map.entry(key) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += v;
            if *o.get() == 0 {
                o.remove();
            }
        }
        Entry::Vacant(e) => {
            if v != 0 {
                e.insert(v);
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PppJson {
    m: usize,
    n: usize,
    potentials: Vec<(u32, u32, i64)>,
    interactions: Vec<(u32, u32, u32, u32, i64)>,
    #[serde(default, skip_serializing_if = "is_zero")]
    shift: i64,
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

/// Number of consistent quartets, `m n (m-1) (n-1) / 2`.
pub fn quartet_count(m: usize, n: usize) -> u64 {
    (m as u64 * n as u64 * (m as u64).saturating_sub(1) * (n as u64).saturating_sub(1)) / 2
}

/// Fraction of consistent quartets carrying a nonzero interaction.
pub fn density(inst: &PppInstance) -> Result<Rational, PppError> {
    let q = quartet_count(inst.m, inst.n);
    if q == 0 {
        return Err(PppError::DegenerateQ { m: inst.m, n: inst.n });
    }
    Ok(Rational::new(inst.interactions.len() as i64, q as i64))
}

/// Sum of the potentials and interactions selected by `p`.
pub fn ppp_value(inst: &PppInstance, p: &PartialPermutation) -> Result<i64, PppError> {
    if p.m() != inst.m || p.n() != inst.n {
        return Err(PppError::DimensionMismatch { m: inst.m, n: inst.n, got_m: p.m(), got_n: p.n() });
    }
    let v = p.values();
    let pot: i64 = inst.potentials.iter().filter(|(&(i, j), _)| v[i as usize] == j as usize).map(|(_, &w)| w).sum();
    let int: i64 = inst
        .interactions
        .iter()
        .filter(|(&(i, j, ip, jp), _)| v[i as usize] == j as usize && v[ip as usize] == jp as usize)
        .map(|(_, &w)| w)
        .sum();
    Ok(pot + int)
}

/// Which kernel variables carry the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveTarget {
    /// One variable per placement (one-hot and extended kernels).
    OneHotMatrix,
    /// Row differences of the domain-wall matrix (dual-matrix and all-different kernels).
    DeltaA,
}

impl ObjectiveTarget {
    pub fn natural(technique: Technique) -> Self {
        match technique {
            Technique::OneHot | Technique::Extended => ObjectiveTarget::OneHotMatrix,
            Technique::DualMatrix | Technique::AllDifferent => ObjectiveTarget::DeltaA,
        }
    }
}

/// Affine link between the composed energy and the placement value at feasible
/// states: `energy = lambda * optimal + scale * PPP + shift`.
pub fn objective_scale(kind: Kind) -> i64 {
    match kind {
        Kind::Qubo => 1,
        Kind::Ising => 4,
    }
}

/// Adds `scale * PPP` over the target variables. In spin form each placement
/// indicator is `(s + 1) / 2`, and the whole objective is multiplied by 4 so every
/// coefficient stays an integer.
pub fn emit_objective(
    inst: &PppInstance,
    spec: &KernelSpec,
    target: ObjectiveTarget,
    b: &mut ExpressionBuilder,
) -> Result<(), PppError> {
    if inst.m != spec.m || inst.n != spec.n {
        return Err(PppError::DimensionMismatch { m: spec.m, n: spec.n, got_m: inst.m, got_n: inst.n });
    }
    let ok = match target {
        ObjectiveTarget::OneHotMatrix => spec.has_one_hot_matrix(),
        ObjectiveTarget::DeltaA => spec.has_row_walls(),
    };
    if !ok {
        return Err(PppError::UnsupportedTarget { target, technique: spec.technique });
    }
    let ising = spec.kind == Kind::Ising;
    // Placement indicator, times 2 in spin form.
    let indicator = |i: usize, j: usize| -> LinearForm {
        match target {
            ObjectiveTarget::OneHotMatrix => {
                let x = LinearForm::var(spec.x_index(i, j).expect("in range"));
                if ising {
                    x + 1
                } else {
                    x
                }
            }
            ObjectiveTarget::DeltaA => spec.row_delta(i, j),
        }
    };
    let pot_weight = if ising { 2 } else { 1 };
    let one = LinearForm::constant(1);
    for (&(i, j), &v) in &inst.potentials {
        b.add_product(Rational::from_integer(pot_weight * v), &indicator(i as usize, j as usize), &one);
    }
    b.reserve(4 * inst.interactions.len());
    for (&(i, j, ip, jp), &v) in &inst.interactions {
        let f = indicator(i as usize, j as usize);
        let g = indicator(ip as usize, jp as usize);
        b.add_product(Rational::from_integer(v), &f, &g);
    }
    Ok(())
}

/// The objective alone, over the variables of `spec`.
pub fn objective_terms(inst: &PppInstance, spec: &KernelSpec, target: ObjectiveTarget) -> Result<QuadraticModel, PppError> {
    let mut b = ExpressionBuilder::new(spec.kind, spec.num_vars());
    emit_objective(inst, spec, target, &mut b)?;
    Ok(b.finalize()?)
}

/// `2 (sum|P| + sum|I|) + 1`.
pub fn default_lambda(inst: &PppInstance) -> i64 {
    inst.total_weight().saturating_mul(2).saturating_add(1)
}

/// Penalty weight that makes every infeasible state worse than the best feasible
/// one. Energies of one model differ by multiples of 1 (bits) or 2 (spins), and the
/// objective spans at most `2 * scale * (sum|P| + sum|I|)`.
pub fn default_lambda_for(inst: &PppInstance, kind: Kind) -> i64 {
    let gap = match kind {
        Kind::Qubo => 1,
        Kind::Ising => 2,
    };
    (2 * objective_scale(kind) / gap).saturating_mul(inst.total_weight()).saturating_add(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lambda {
    Auto,
    Fixed(i64),
}

impl std::str::FromStr for Lambda {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Lambda::Auto);
        }
        match s.parse::<i64>() {
            Ok(v) if v > 0 => Ok(Lambda::Fixed(v)),
            _ => Err(format!("lambda must be AUTO or a positive integer, got '{s}'")),
        }
    }
}

/// A kernel with a placement objective on top.
#[derive(Clone, Debug)]
pub struct EncodedProblem {
    pub spec: KernelSpec,
    pub target: ObjectiveTarget,
    pub lambda: i64,
    pub model: QuadraticModel,
    pub layout: VariableLayout,
    pub objective_scale: i64,
    pub objective_shift: Rational,
}

impl EncodedProblem {
    pub fn optimal_value(&self) -> Rational {
        self.spec.optimal_value()
    }

    /// Energy of a feasible state with placement value `ppp`.
    pub fn feasible_energy(&self, ppp: i64) -> Rational {
        self.optimal_value() * self.lambda + Rational::from_integer(self.objective_scale * ppp) + self.objective_shift
    }

    pub fn meta(&self) -> EncodingMeta {
        EncodingMeta {
            technique: self.spec.technique,
            m: self.spec.m,
            n: self.spec.n,
            optimal: self.optimal_value(),
            lambda: self.lambda,
            objective_scale: self.objective_scale,
            objective_shift: self.objective_shift,
        }
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile { model: self.model.clone(), layout: self.layout.clone(), encoding: Some(self.meta()) }
    }

    /// Rebuilds the decoding context from a file written by [`to_model_file`](Self::to_model_file).
    pub fn from_model_file(file: ModelFile) -> Result<Self, PppError> {
        let meta = file.encoding.ok_or_else(|| PppError::Parse("model has no encoding metadata".into()))?;
        let spec = KernelSpec::new(meta.technique, meta.m, meta.n, file.model.kind())?;
        if spec.num_vars() != file.model.num_vars() {
            return Err(PppError::Parse("encoding metadata does not match the model size".into()));
        }
        Ok(EncodedProblem {
            spec,
            target: ObjectiveTarget::natural(meta.technique),
            lambda: meta.lambda,
            model: file.model,
            layout: file.layout,
            objective_scale: meta.objective_scale,
            objective_shift: meta.objective_shift,
        })
    }
}

pub fn compose(inst: &PppInstance, technique: Technique, kind: Kind, lambda: Lambda) -> Result<EncodedProblem, PppError> {
    compose_with_target(inst, technique, kind, lambda, ObjectiveTarget::natural(technique))
}

pub fn compose_with_target(
    inst: &PppInstance,
    technique: Technique,
    kind: Kind,
    lambda: Lambda,
    target: ObjectiveTarget,
) -> Result<EncodedProblem, PppError> {
    let spec = KernelSpec::new(technique, inst.m, inst.n, kind)?;
    let lambda = match lambda {
        Lambda::Auto => default_lambda_for(inst, kind),
        Lambda::Fixed(v) if v > 0 => v,
        Lambda::Fixed(v) => return Err(PppError::InvalidLambda(v)),
    };
    let mut b = ExpressionBuilder::new(kind, spec.num_vars());
    spec.emit(&mut b, lambda);
    emit_objective(inst, &spec, target, &mut b)?;
    let model = b.finalize()?;
    Ok(EncodedProblem {
        spec,
        target,
        lambda,
        model,
        layout: spec.layout(),
        objective_scale: objective_scale(kind),
        objective_shift: Rational::from_integer(0),
    })
}

/// Quadratic term counts of a composed model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermCounts {
    pub interactions: usize,
    /// Quadratic terms of the kernel alone.
    pub kernel: usize,
    /// Quadratic terms of the composed model.
    pub total: usize,
}

/// Builds the kernel and the composed model and counts their quadratic terms.
pub fn term_counts(inst: &PppInstance, technique: Technique, kind: Kind, lambda: Lambda) -> Result<TermCounts, PppError> {
    let kernel = KernelSpec::new(technique, inst.m, inst.n, kind)?.build()?.model.quadratic().len();
    let total = compose(inst, technique, kind, lambda)?.model.quadratic().len();
    Ok(TermCounts { interactions: inst.interactions.len(), kernel, total })
}

/// Evaluates an assignment and reads back the placement and its value when feasible.
pub fn decode_solution(enc: &EncodedProblem, assignment: &[i8]) -> Result<Solution, PppError> {
    let energy = enc.model.evaluate(assignment)?;
    let decoded = enc.spec.decode(assignment);
    let permutation = decoded.permutation().cloned();
    let objective = permutation.as_ref().map(|_| {
        let v = (energy - enc.optimal_value() * enc.lambda - enc.objective_shift) / enc.objective_scale;
        debug_assert!(v.is_integer());
        v.to_integer()
    });
    Ok(Solution {
        assignment: assignment.to_vec(),
        energy,
        feasible: permutation.is_some(),
        permutation,
        objective,
        solver: String::new(),
        seed: None,
        sweeps: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// m = n = 2, P = {(0,1):1, (1,0):2}, I = {(0,1,1,0):-3, (0,0,1,1):5}.
    fn two_particles() -> PppInstance {
        let mut inst = PppInstance::new(2, 2).unwrap();
        inst.add_potential(0, 1, 1).unwrap();
        inst.add_potential(1, 0, 2).unwrap();
        inst.add_interaction(0, 1, 1, 0, -3).unwrap();
        inst.add_interaction(0, 0, 1, 1, 5).unwrap();
        inst
    }

    fn perm(v: &[usize], n: usize) -> PartialPermutation {
        PartialPermutation::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn values_of_both_placements() {
        let inst = two_particles();
        assert_eq!(ppp_value(&inst, &perm(&[1, 0], 2)).unwrap(), 0);
        assert_eq!(ppp_value(&inst, &perm(&[0, 1], 2)).unwrap(), 5);
        assert_eq!(ppp_value(&PppInstance::new(2, 2).unwrap(), &perm(&[0, 1], 2)).unwrap(), 0);
        assert!(ppp_value(&inst, &perm(&[0], 2)).is_err());
    }

    #[test]
    fn quartets_are_canonical_and_accumulate() {
        let mut inst = PppInstance::new(2, 3).unwrap();
        inst.add_interaction(1, 2, 0, 0, 4).unwrap();
        inst.add_interaction(0, 0, 1, 2, 1).unwrap();
        assert_eq!(inst.interactions().iter().collect::<Vec<_>>(), [(&(0, 0, 1, 2), &5)]);
        inst.add_interaction(0, 0, 1, 2, -5).unwrap();
        assert!(inst.interactions().is_empty());
        assert!(inst.add_interaction(0, 1, 0, 2, 1).is_err());
        assert!(inst.add_interaction(0, 1, 1, 1, 1).is_err());
        assert!(inst.add_potential(2, 0, 1).is_err());
    }

    #[test]
    fn lambda_formula() {
        assert_eq!(default_lambda(&two_particles()), 23);
        assert_eq!(default_lambda(&PppInstance::new(2, 2).unwrap()), 1);
        let mut inst = PppInstance::new(2, 2).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            inst.add_potential(i, j, if (i + j) % 2 == 0 { 1 } else { -1 }).unwrap();
        }
        assert_eq!(default_lambda(&inst), 9);
        assert_eq!(default_lambda_for(&inst, Kind::Ising), 17);
    }

    #[test]
    fn single_interaction_on_one_hot_matrix() {
        let mut inst = PppInstance::new(2, 3).unwrap();
        inst.add_interaction(0, 1, 1, 2, 7).unwrap();
        let spec = KernelSpec::new(Technique::OneHot, 2, 3, Kind::Qubo).unwrap();
        let m = objective_terms(&inst, &spec, ObjectiveTarget::OneHotMatrix).unwrap();
        assert!(m.linear().is_empty());
        let x01 = spec.x_index(0, 1).unwrap();
        let x12 = spec.x_index(1, 2).unwrap();
        assert_eq!(m.quadratic().len(), 1);
        assert_eq!(m.quadratic_coefficient(x01, x12), 7);
    }

    #[test]
    fn single_interaction_on_row_differences() {
        let mut inst = PppInstance::new(2, 4).unwrap();
        inst.add_interaction(0, 1, 1, 2, 7).unwrap();
        let spec = KernelSpec::new(Technique::DualMatrix, 2, 4, Kind::Qubo).unwrap();
        let m = objective_terms(&inst, &spec, ObjectiveTarget::DeltaA).unwrap();
        // (a00 - a01)(a11 - a12), A is 2x3.
        let w: Vec<(u32, u32, i64)> = m.quadratic().iter().map(|c| (c.i, c.j, c.weight)).collect();
        assert_eq!(w, [(0, 4, 7), (0, 5, -7), (1, 4, -7), (1, 5, 7)]);
        assert!(m.linear().is_empty());
    }

    #[test]
    fn empty_instance_gives_empty_objective() {
        let inst = PppInstance::new(3, 3).unwrap();
        for t in Technique::ALL {
            let spec = KernelSpec::new(t, 3, 3, Kind::Ising).unwrap();
            let m = objective_terms(&inst, &spec, ObjectiveTarget::natural(t)).unwrap();
            assert!(m.linear().is_empty() && m.quadratic().is_empty());
            assert_eq!(m.offset(), Rational::from_integer(0));
        }
    }

    #[test]
    fn unsupported_targets() {
        let inst = PppInstance::new(2, 2).unwrap();
        let spec = KernelSpec::new(Technique::OneHot, 2, 2, Kind::Qubo).unwrap();
        assert!(matches!(objective_terms(&inst, &spec, ObjectiveTarget::DeltaA), Err(PppError::UnsupportedTarget { .. })));
        let spec = KernelSpec::new(Technique::DualMatrix, 2, 2, Kind::Qubo).unwrap();
        assert!(objective_terms(&inst, &spec, ObjectiveTarget::OneHotMatrix).is_err());
    }

    #[test]
    fn feasible_energies_follow_the_affine_rule() {
        let inst = two_particles();
        for t in Technique::ALL {
            for kind in [Kind::Qubo, Kind::Ising] {
                let enc = compose(&inst, t, kind, Lambda::Fixed(23)).unwrap();
                for p in PartialPermutation::all(2, 2) {
                    let a = enc.spec.encode(&p).unwrap();
                    let sol = decode_solution(&enc, &a).unwrap();
                    let v = ppp_value(&inst, &p).unwrap();
                    assert_eq!(sol.energy, enc.feasible_energy(v), "{t} {kind} {p}");
                    assert_eq!(sol.objective, Some(v));
                }
            }
        }
    }

    #[test]
    fn all_different_rejected_for_partial_instances() {
        let inst = PppInstance::new(2, 3).unwrap();
        assert!(matches!(
            compose(&inst, Technique::AllDifferent, Kind::Qubo, Lambda::Auto),
            Err(PppError::Kernel(KernelError::UnsupportedCombination { .. }))
        ));
        assert_eq!(compose(&inst, Technique::OneHot, Kind::Qubo, Lambda::Fixed(0)).unwrap_err(), PppError::InvalidLambda(0));
    }

    #[test]
    fn all_zero_assignment_is_infeasible() {
        let enc = compose(&two_particles(), Technique::OneHot, Kind::Qubo, Lambda::Fixed(23)).unwrap();
        let sol = decode_solution(&enc, &[0, 0, 0, 0]).unwrap();
        assert!(!sol.feasible);
        assert_eq!(sol.objective, None);
    }

    #[test]
    fn json_round_trip() {
        let mut inst = two_particles();
        inst.set_shift(12);
        let back = PppInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert!(two_particles().to_json().starts_with(r#"{"m":2,"n":2,"potentials":[[0,1,1],[1,0,2]],"interactions":[[0,0,1,1,5],[0,1,1,0,-3]]}"#));
    }

    #[test]
    fn density_of_small_instances() {
        assert_eq!(quartet_count(2, 2), 2);
        assert_eq!(density(&two_particles()).unwrap(), Rational::from_integer(1));
        assert_eq!(density(&PppInstance::new(3, 3).unwrap()).unwrap(), Rational::from_integer(0));
        assert!(matches!(density(&PppInstance::new(1, 3).unwrap()), Err(PppError::DegenerateQ { .. })));
    }
}
