//! The four conditions on `(p_j, x_j, y_j, A_j)`:
//!
//! ```text
//! (1) Σ p_j = 1
//! (2) y_j ≥ x_j
//! (3) (1 − p_j) x_j ≤ 2 Σ_{k≠j} x_k                                  non-singularity
//! (4) A_j ≤ x_j (1 − p_j) + p_j^{1/p} (Σ_{k≠j} x_k^p)^{1/p} (1 − p_j)^{1/p'}
//! ```

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::params::conjugate_exponent;
use crate::report::Report;

pub const NONSINGULARITY: &str = "non-singularity";
pub const A_BOUND: &str = "A-bound";
pub const DOMINATION: &str = "y-dominates-x";

/// `Σ_{k≠j} v_k` for every `j`, without cancellation.
pub fn leave_one_out_sums(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut suffix = alloc::vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + values[i];
    }
    let mut prefix = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(prefix + suffix[i + 1]);
        prefix += values[i];
    }
    out
}

/// Right-hand sides of (4).
pub fn a_caps(probs: &[f64], x: &[f64], p: f64) -> Vec<f64> {
    let p_prime = conjugate_exponent(p);
    let powers: Vec<f64> = x.iter().map(|v| v.powf(p)).collect();
    let others = leave_one_out_sums(&powers);
    probs
        .iter()
        .zip(x)
        .zip(others)
        .map(|((&pj, &xj), rest)| {
            let q = (1.0 - pj).max(0.0);
            xj * q + pj.powf(1.0 / p) * rest.powf(1.0 / p) * q.powf(1.0 / p_prime)
        })
        .collect()
}

/// Checks (3) for the sequence `x` (also used on `y`).
pub fn check_nonsingularity(probs: &[f64], x: &[f64]) -> Report {
    let others = leave_one_out_sums(x);
    let scale: f64 = x.iter().sum();
    Report::from_pairs(
        NONSINGULARITY,
        probs
            .iter()
            .zip(x)
            .zip(others)
            .map(|((pj, xj), rest)| ((1.0 - pj) * xj, 2.0 * rest)),
        scale,
    )
}

/// Checks (4).
pub fn check_a_bound(probs: &[f64], x: &[f64], a: &[f64], p: f64) -> Report {
    let caps = a_caps(probs, x, p);
    let scale = caps.iter().chain(a).fold(0.0_f64, |m, v| m.max(v.abs()));
    Report::from_pairs(A_BOUND, a.iter().copied().zip(caps), scale)
}

/// Checks (2).
pub fn check_domination(x: &[f64], y: &[f64]) -> Report {
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Report::from_pairs(DOMINATION, x.iter().copied().zip(y.iter().copied()), scale)
}
