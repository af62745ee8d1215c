//! Single-flip Metropolis annealing with a geometric schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::graph::{to_assignment, Csr};
use super::{Solution, SolverError};
use crate::model::{QuadraticModel, Rational};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaParams {
    pub seed: u64,
    pub sweeps: usize,
    pub restarts: usize,
    pub t_initial: Temperature,
    pub t_final: Temperature,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams { seed: 0, sweeps: 1000, restarts: 1, t_initial: Temperature::Auto, t_final: Temperature::Auto }
    }
}

impl SaParams {
    /// Start and end temperatures for `model`.
    pub fn temperatures(&self, model: &QuadraticModel) -> (f64, f64) {
        let t0 = match self.t_initial {
            Temperature::Auto => model.max_abs_coefficient().max(1) as f64,
            Temperature::Fixed(t) => t,
        };
        let tf = match self.t_final {
            Temperature::Auto => 0.1,
            Temperature::Fixed(t) => t,
        };
        (t0, tf)
    }

    /// Per-sweep cooling factor.
    pub fn ratio(&self, model: &QuadraticModel) -> f64 {
        let (t0, tf) = self.temperatures(model);
        if self.sweeps <= 1 {
            return tf / t0;
        }
        (tf / t0).powf(1.0 / (self.sweeps - 1) as f64)
    }

    pub fn validate(&self, model: &QuadraticModel) -> Result<(), SolverError> {
        let bad = |s: String| Err(SolverError::InvalidParams(s));
        if self.sweeps == 0 {
            return bad("sweeps must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        let (t0, tf) = self.temperatures(model);
        if !(t0.is_finite() && tf.is_finite() && t0 > 0.0 && tf > 0.0) {
            return bad(format!("temperatures must be positive, got {t0} and {tf}"));
        }
        let r = self.ratio(model);
        if !(r > 0.0 && r < 1.0) {
            return bad(format!("final temperature {tf} must be below initial temperature {t0}"));
        }
        Ok(())
    }
}

/// Best state seen over all restarts; ties go to the lexicographically smaller assignment.
pub fn simulated_annealing(model: &QuadraticModel, params: &SaParams) -> Result<Solution, SolverError> {
    params.validate(model)?;
    let csr = Csr::new(model)?;
    let (t0, _) = params.temperatures(model);
    let ratio = params.ratio(model);
    let runs: Vec<(i64, Vec<i64>)> =
        (0..params.restarts).into_par_iter().map(|r| anneal(&csr, params.seed, r as u64, params.sweeps, t0, ratio)).collect();
    let (e, vals) = runs.into_iter().min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1))).expect("restarts >= 1");
    let assignment = to_assignment(&vals);
    let energy = Rational::from_integer(e) + model.offset();
    debug_assert_eq!(model.evaluate(&assignment).ok(), Some(energy));
    Ok(Solution {
        assignment,
        energy,
        feasible: true,
        permutation: None,
        objective: None,
        solver: "sa".into(),
        seed: Some(params.seed),
        sweeps: Some(params.sweeps),
    })
}

fn anneal(csr: &Csr, seed: u64, stream: u64, sweeps: usize, t0: f64, ratio: f64) -> (i64, Vec<i64>) {
    let n = csr.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut vals: Vec<i64> = (0..n).map(|_| if rng.gen::<bool>() { csr.hot } else { csr.cold }).collect();
    if n == 0 {
        return (0, vals);
    }
    let mut fields = csr.fields(&vals);
    let mut e = csr.energy(&vals);
    let mut best = (e, vals.clone());
    let mut t = t0;
    for _ in 0..sweeps {
        let beta = 1.0 / t;
        for _ in 0..n {
            let v = rng.gen_range(0..n);
            let delta = if vals[v] == csr.hot { csr.cold - csr.hot } else { csr.hot - csr.cold };
            let de = delta * fields[v];
            if de <= 0 || rng.gen::<f64>() < (-(de as f64) * beta).exp() {
                e += csr.flip(v, &mut vals, &mut fields);
                if e < best.0 {
                    best.0 = e;
                    best.1.copy_from_slice(&vals);
                }
            }
        }
        t *= ratio;
    }
    best
}
