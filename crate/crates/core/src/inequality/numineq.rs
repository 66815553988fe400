//! The inequality
//!
//! ```text
//! Σ μ A_j^p + Σ μ C^{(p−1)/p} A_j y_j^{p−1} ≤ C ((Σ y_j)^p − Σ y_j^p)
//! ```
//!
//! and the smallest `C` for which it holds on a given instance.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::instance::{InequalityInstance, InstanceGenerator};
use crate::error::{Error, Result};

/// Relative slack allowed on the right-hand side.
pub const HOLDS_TOLERANCE: f64 = 1e-12;
/// Steps of bisection once a bracket is found.
pub const BISECTION_STEPS: usize = 60;
/// Largest exponent `k` tried when doubling the bracket `[0, 2^k]`.
const MAX_DOUBLINGS: i32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NumIneqOutcome {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// `(Σ v)^p − Σ v^p`, summed as `Σ v_j S^{p−1} (1 − (v_j/S)^{p−1})` so every
/// term is non-negative in floating point.
pub fn power_gap(values: &[f64], p: f64) -> f64 {
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let scale = total.powf(p - 1.0);
    values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * scale * -((p - 1.0) * (v / total).ln()).exp_m1())
        .sum()
}

/// The three sums the inequality is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumIneqSums {
    pub p: f64,
    /// `μ Σ A_j^p`
    pub a_power: f64,
    /// `μ Σ A_j y_j^{p−1}`
    pub a_mixed: f64,
    /// `(Σ y_j)^p − Σ y_j^p`
    pub gap: f64,
}

impl NumIneqSums {
    pub fn new(inst: &InequalityInstance) -> Self {
        let p = inst.p;
        let a_power = inst.mu * inst.a.iter().map(|a| a.powf(p)).sum::<f64>();
        let a_mixed = inst.mu
            * inst
                .a
                .iter()
                .zip(&inst.y)
                .map(|(a, y)| a * y.powf(p - 1.0))
                .sum::<f64>();
        Self {
            p,
            a_power,
            a_mixed,
            gap: power_gap(&inst.y, p),
        }
    }

    pub fn evaluate(&self, c: f64) -> NumIneqOutcome {
        let lhs = self.a_power + c.powf((self.p - 1.0) / self.p) * self.a_mixed;
        let rhs = c * self.gap;
        NumIneqOutcome {
            holds: lhs <= rhs * (1.0 + HOLDS_TOLERANCE),
            lhs,
            rhs,
        }
    }

    /// Smallest `C` (to bisection precision) at which the inequality holds,
    /// or `None` when no finite `C` works.
    ///
    /// As a function of `t = C^{1/p}` the difference `rhs − lhs` is
    /// `t^{p−1}(t·gap − a_mixed) − a_power`: non-positive up to its minimum
    /// and increasing after it, so it changes sign once.
    pub fn minimal_constant(&self) -> Option<f64> {
        if self.a_power == 0.0 && self.a_mixed == 0.0 {
            return Some(0.0);
        }
        if !(self.gap > 0.0) {
            return None;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut k = 0;
        while !self.evaluate(hi).holds {
            lo = hi;
            hi *= 2.0;
            k += 1;
            if k > MAX_DOUBLINGS {
                return None;
            }
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.evaluate(mid).holds {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// Evaluates both sides exactly as written.
pub fn check_numineq(inst: &InequalityInstance, c: f64) -> Result<NumIneqOutcome> {
    inst.validate()?;
    Ok(NumIneqSums::new(inst).evaluate(c))
}

/// Per-instance minimal constant.
pub fn minimal_constant(inst: &InequalityInstance) -> Option<f64> {
    NumIneqSums::new(inst).minimal_constant()
}

/// Supremum of per-instance minimal constants over a corpus.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConstantEstimate {
    pub constant: f64,
    /// Corpus index attaining the supremum.
    pub argmax: Option<u64>,
    pub instances: u64,
    /// Instances with no finite constant (the right-hand side vanishes but
    /// the left does not).
    pub unbounded: Vec<u64>,
}

impl ConstantEstimate {
    pub fn empty() -> Self {
        Self {
            constant: 0.0,
            argmax: None,
            instances: 0,
            unbounded: Vec::new(),
        }
    }

    pub fn absorb(&mut self, index: u64, value: Option<f64>) {
        self.instances += 1;
        match value {
            Some(c) if c > self.constant || self.argmax.is_none() => {
                self.constant = self.constant.max(c);
                self.argmax = Some(index);
            }
            Some(_) => {}
            None => self.unbounded.push(index),
        }
    }
}

/// Empirical lower estimate of the constant: the largest per-instance
/// minimal `C` over `trials` instances drawn from `generator` under `seed`.
pub fn min_constant(generator: &InstanceGenerator, seed: u64, trials: u64) -> Result<ConstantEstimate> {
    if trials == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut estimate = ConstantEstimate::empty();
    for i in 0..trials {
        estimate.absorb(i, minimal_constant(&generator.instance(seed, i)));
    }
    Ok(estimate)
}
