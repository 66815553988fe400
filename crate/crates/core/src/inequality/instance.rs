use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use super::conditions;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::rng;
use crate::single_step::SingleStepData;

/// Tolerance on `Σ p_j = 1`.
const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Four non-negative sequences with the exponent `p` and weight `μ`,
/// satisfying conditions (1)–(4).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InequalityInstance {
    pub p: f64,
    pub mu: f64,
    pub probs: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub a: Vec<f64>,
}

impl InequalityInstance {
    /// Validates shapes, signs and the four conditions.
    pub fn new(p: f64, mu: f64, probs: Vec<f64>, x: Vec<f64>, y: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let inst = Self { p, mu, probs, x, y, a };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_decomposition(d: &SingleStepData, mu: f64) -> Result<Self> {
        Self::new(d.p, mu, d.probs.clone(), d.x.clone(), d.y.clone(), d.a_values.clone())
    }

    pub fn atoms(&self) -> usize {
        self.probs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidInstance("p must satisfy 1 < p < ∞"));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidInstance("mu must be positive"));
        }
        let s = self.probs.len();
        if s == 0 {
            return Err(Error::InvalidInstance("sequences are empty"));
        }
        if self.x.len() != s || self.y.len() != s || self.a.len() != s {
            return Err(Error::InvalidInstance("sequences differ in length"));
        }
        let all = self.probs.iter().chain(&self.x).chain(&self.y).chain(&self.a);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite entry"));
        }
        if all.clone().any(|&v| v < 0.0) {
            return Err(Error::InvalidInstance("negative entry"));
        }
        if (self.probs.iter().sum::<f64>() - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidInstance("probabilities do not sum to one"));
        }
        for report in [
            conditions::check_domination(&self.x, &self.y),
            conditions::check_nonsingularity(&self.probs, &self.x),
            conditions::check_a_bound(&self.probs, &self.x, &self.a, self.p),
        ] {
            first_violation(&report)?;
        }
        Ok(())
    }
}

fn first_violation(report: &Report) -> Result<()> {
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::ConditionViolated {
            condition: report.condition,
            index: v.index,
            lhs: v.lhs,
            rhs: v.rhs,
        }),
    }
}

/// Random instances satisfying (1)–(4).
///
/// `s` is uniform in `[min_atoms, max_atoms]`; `p_j` are normalized
/// exponential draws; `x_j` are exponential draws, with the one coordinate
/// that may break non-singularity scaled down onto its cap; `y_j = x_j (1 +
/// ξ_j)` where `ξ_j` is zero with probability `exact_share` and log-normal
/// with log-scale `noise_sigma` otherwise; `A_j = u_j · cap_j` where `u_j` is
/// one with probability `cap_share` and uniform on `[0, 1]` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceGenerator {
    pub p: f64,
    pub mu: f64,
    pub min_atoms: usize,
    pub max_atoms: usize,
    pub exact_share: f64,
    pub noise_sigma: f64,
    pub x_spread: f64,
    pub cap_share: f64,
    /// Force `y = x` (the reduced case).
    pub reduced: bool,
}

impl InstanceGenerator {
    pub fn new(p: f64, mu: f64) -> Self {
        Self {
            p,
            mu,
            min_atoms: 1,
            max_atoms: crate::single_step::DEFAULT_MAX_ATOMS,
            exact_share: 0.5,
            noise_sigma: 1.5,
            x_spread: 3.0,
            cap_share: 0.5,
            reduced: false,
        }
    }

    pub fn with_atoms(mut self, min_atoms: usize, max_atoms: usize) -> Self {
        self.min_atoms = min_atoms;
        self.max_atoms = max_atoms;
        self
    }

    pub fn reduced(mut self) -> Self {
        self.reduced = true;
        self
    }

    /// The `index`-th instance of the corpus keyed by `seed`.
    pub fn instance(&self, seed: u64, index: u64) -> InequalityInstance {
        self.sample(&mut rng::stream(seed, index))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InequalityInstance {
        let s = rng.random_range(self.min_atoms..=self.max_atoms);
        let probs = rng::simplex(rng, s);
        let x = nonsingular_draw(rng, &probs, self.x_spread);
        let y = if self.reduced {
            x.clone()
        } else {
            x.iter()
                .map(|&xj| {
                    if rng.random::<f64>() < self.exact_share {
                        xj
                    } else {
                        xj * (1.0 + (self.noise_sigma * rng::normal(rng)).exp())
                    }
                })
                .collect()
        };
        let caps = conditions::a_caps(&probs, &x, self.p);
        let a = caps
            .iter()
            .map(|c| {
                if rng.random::<f64>() < self.cap_share {
                    *c
                } else {
                    c * rng.random::<f64>()
                }
            })
            .collect();
        InequalityInstance {
            p: self.p,
            mu: self.mu,
            probs,
            x,
            y,
            a,
        }
    }
}

/// Exponential draws with the (at most one) coordinate violating
/// non-singularity moved onto its cap `2 Σ_{k≠j} x_k / (1 − p_j)`.
pub fn nonsingular_draw<R: Rng + ?Sized>(rng: &mut R, probs: &[f64], log_spread: f64) -> Vec<f64> {
    let mut x: Vec<f64> = probs.iter().map(|_| (log_spread * rng::normal(rng)).exp()).collect();
    let others = conditions::leave_one_out_sums(&x);
    for j in 0..x.len() {
        let q = 1.0 - probs[j];
        if q * x[j] > 2.0 * others[j] {
            x[j] = 2.0 * others[j] / q;
            break;
        }
    }
    x
}
