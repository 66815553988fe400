//! The non-singularity lemma, the reduction of `y` towards the
//! non-singular case, and the two inequalities of the reduced case.


#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::conditions;
use super::instance::InequalityInstance;
use super::numineq::power_gap;
use crate::error::{Error, Result};

/// Tolerance used when checking that `x = y` in the reduced case.
const REDUCED_TOLERANCE: f64 = 1e-12;

/// Both sides of
///
/// ```text
/// (Σ x_j)^p − Σ x_j^p  ≳  (1 − p_1) x_1^p + (Σ_{j>1} x_j)^p
/// ```
///
/// where index 1 carries the largest probability. The proof gives the
/// implied constant only through `1 − (4/5)^{p−1}`; this reports it
/// empirically.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NonsingGap {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, with `0/0 = 0`.
    pub ratio: f64,
}

impl NonsingGap {
    /// `rhs / lhs`, the constant hidden in `≳` for this instance, with `0/0 = 0`.
    pub fn implied_constant(&self) -> f64 {
        ratio_or_zero(self.rhs, self.lhs)
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn nonsing_gap(x: &[f64], probs: &[f64], p: f64) -> Result<NonsingGap> {
    if x.len() != probs.len() || x.is_empty() {
        return Err(Error::InvalidInstance("sequences differ in length"));
    }
    let report = conditions::check_nonsingularity(probs, x);
    if let Some(v) = report.violations.first() {
        return Err(Error::ConditionViolated {
            condition: report.condition,
            index: v.index,
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }
    let top = probs
        .iter()
        .enumerate()
        .fold(0, |best, (i, &pi)| if pi > probs[best] { i } else { best });
    let rest: f64 = x.iter().enumerate().filter(|&(i, _)| i != top).map(|(_, v)| v).sum();
    let lhs = power_gap(x, p);
    let rhs = (1.0 - probs[top]).max(0.0) * x[top].powf(p) + rest.powf(p);
    Ok(NonsingGap {
        lhs,
        rhs,
        ratio: ratio_or_zero(lhs, rhs),
    })
}

/// Lowers the largest `y_k` while `θ = Σ_{j≠k} y_j / y_k < 2`, stopping at
/// `max(x_k, Σ_{j≠k} y_j / 2)`. Every other field is unchanged.
pub fn reduce_to_nonsingular(inst: &InequalityInstance) -> InequalityInstance {
    let mut out = inst.clone();
    let Some(k) = (0..out.y.len()).reduce(|best, i| if out.y[i] > out.y[best] { i } else { best }) else {
        return out;
    };
    let rest: f64 = out.y.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, v)| v).sum();
    if out.y[k] > 0.5 * rest {
        out.y[k] = out.x[k].max(0.5 * rest);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SplitRatios {
    /// `Σ A_j^p / ((Σ y_j)^p − Σ y_j^p)`
    pub ratio1: f64,
    /// `Σ A_j y_j^{p−1} / ((Σ y_j)^p − Σ y_j^p)`
    pub ratio2: f64,
}

/// Left-over-right ratios of the two inequalities that together give the
/// four-sequence inequality once `x = y`. `0/0` is reported as 0.
pub fn check_split_inequalities(inst: &InequalityInstance) -> Result<SplitRatios> {
    for (index, (x, y)) in inst.x.iter().zip(&inst.y).enumerate() {
        if (x - y).abs() > REDUCED_TOLERANCE * x.abs().max(y.abs()) {
            return Err(Error::NotReduced { index });
        }
    }
    let p = inst.p;
    let gap = power_gap(&inst.y, p);
    let first: f64 = inst.a.iter().map(|a| a.powf(p)).sum();
    let second: f64 = inst.a.iter().zip(&inst.y).map(|(a, y)| a * y.powf(p - 1.0)).sum();
    Ok(SplitRatios {
        ratio1: ratio_or_zero(first, gap),
        ratio2: ratio_or_zero(second, gap),
    })
}

/// `y` after reduction satisfies non-singularity.
pub fn reduced_is_nonsingular(inst: &InequalityInstance) -> bool {
    conditions::check_nonsingularity(&inst.probs, &inst.y).passed()
}

/// Copies with `x` raised to `y`, the form the split inequalities expect.
pub fn raise_x_to_y(inst: &InequalityInstance) -> InequalityInstance {
    InequalityInstance {
        x: inst.y.clone(),
        ..inst.clone()
    }
}
