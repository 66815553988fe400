//! The first step of a martingale and the quantities attached to each
//! level-1 atom `a_j`:
//!
//! | symbol | value |
//! |--------|-------|
//! | `p_j`  | `P(a_j)` |
//! | `f_j`  | `F_1` on `a_j`; `f̄ = F_0` |
//! | `x_j`  | `p_j max(|f_j|, |f̄|)` |
//! | `y_j`  | `∫_{a_j} F^* dP` |
//! | `A`    | `|(E_1 − E_0) M_1 F_1|`, constant on each `a_j` |
//! | `B`    | `|Σ_{n≥2} (E_n − E_{n−1}) M_n F_n|` |
//! | `A_j`  | `p_j^{1/p} · A|_{a_j}` |
//!
//! with `α = 1/p'`. Then `‖A‖_p^p = Σ A_j^p` and `I'_α F = ±A ± B` pointwise.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::filtration::{relative_sup_error, MartingaleProcess, RandomVariable};
use crate::inequality::conditions;
use crate::params::conjugate_exponent;
use crate::report::Report;
use crate::riesz::conj_riesz;

/// Default cap on the number of level-1 atoms accepted by the fuzzers.
pub const DEFAULT_MAX_ATOMS: usize = 64;

#[derive(Debug, Clone)]
pub struct SingleStepData {
    pub p: f64,
    pub alpha: f64,
    pub probs: Vec<f64>,
    pub f_values: Vec<f64>,
    pub fbar: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub a_values: Vec<f64>,
    /// `A` at level 1.
    pub a: RandomVariable,
    /// Sign of the first summand on each level-1 atom.
    pub a_sign: Vec<f64>,
    /// `B` at the deepest level.
    pub b: RandomVariable,
    /// Sign of the remaining sum at each leaf.
    pub b_sign: Vec<f64>,
    pub martingale: MartingaleProcess,
    /// `I'_α F`, at the deepest level.
    pub potential: RandomVariable,
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Single-step decomposition of `f` with `α = 1/p'`.
pub fn decompose(f: &RandomVariable, p: f64) -> Result<SingleStepData> {
    let tree = f.tree().clone();
    let depth = tree.depth();
    if depth == 0 {
        return Err(Error::DepthZero);
    }
    let alpha = 1.0 / conjugate_exponent(p);
    let terminal = f.condition(depth)?;
    let martingale = MartingaleProcess::from_terminal(&terminal);
    let probs: Vec<f64> = tree.probabilities(1).collect();
    let fbar = martingale.step(0).values()[0];
    let f_values = martingale.step(1).values().to_vec();
    let x = probs
        .iter()
        .zip(&f_values)
        .map(|(pj, fj)| pj * fj.abs().max(fbar.abs()))
        .collect();
    let star_mean = martingale.maximal_function().condition(1)?;
    let y = probs.iter().zip(star_mean.values()).map(|(pj, m)| pj * m).collect();

    let conj = conj_riesz(&terminal, alpha, depth)?;
    let first = &conj.partials[1];
    let a_sign: Vec<f64> = first.values().iter().map(|&v| sign(v)).collect();
    let a = first.abs();
    let a_values = probs
        .iter()
        .zip(a.values())
        .map(|(pj, av)| pj.powf(1.0 / p) * av)
        .collect();
    let tail = conj.value.sub(first)?;
    let b_sign = tail.values().iter().map(|&v| sign(v)).collect();
    let b = tail.abs();

    Ok(SingleStepData {
        p,
        alpha,
        probs,
        f_values,
        fbar,
        x,
        y,
        a_values,
        a,
        a_sign,
        b,
        b_sign,
        martingale,
        potential: conj.value,
    })
}

/// Outcome of [`SingleStepData::check_b_bound`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BBoundReport {
    /// Worst relative error of `B|_{a_j} = p_j^{1/p'} I'_α[G^j]` (signed).
    pub identity_error: f64,
    /// `∫_{a_j} |B|^p dP ≤ C y_j^p` per atom.
    pub bound: Report,
}

impl SingleStepData {
    pub fn atoms(&self) -> usize {
        self.probs.len()
    }

    /// Condition (3) on `x`.
    pub fn check_nonsingularity(&self) -> Report {
        conditions::check_nonsingularity(&self.probs, &self.x)
    }

    /// Condition (4).
    pub fn check_a_bound(&self) -> Report {
        conditions::check_a_bound(&self.probs, &self.x, &self.a_values, self.p)
    }

    /// Condition (2).
    pub fn check_domination(&self) -> Report {
        conditions::check_domination(&self.x, &self.y)
    }

    /// `Σ p_j − 1`.
    pub fn probability_defect(&self) -> f64 {
        self.probs.iter().sum::<f64>() - 1.0
    }

    /// `‖A‖_p^p`.
    pub fn a_norm_pow(&self) -> f64 {
        self.a.lp_norm_pow(self.p).expect("p > 1")
    }

    /// Worst relative error of `I'_α F = sign_A·A + sign_B·B` over the leaves.
    pub fn recombination_error(&self) -> f64 {
        let depth = self.b.level();
        let signed_a = self
            .a
            .zip_with(
                &RandomVariable::from_parts(self.a.tree().clone(), 1, self.a_sign.clone()),
                |m, s| m * s,
            )
            .and_then(|v| v.lift(depth))
            .expect("same tree");
        let rebuilt: Vec<f64> = signed_a
            .values()
            .iter()
            .zip(self.b.values().iter().zip(&self.b_sign))
            .map(|(a, (b, s))| a + s * b)
            .collect();
        relative_sup_error(&rebuilt, self.potential.values())
    }

    /// Compares the tail `B` on each `a_j` with the conjugate potential of
    /// the conditional martingale `G^j` on the rescaled subtree, and checks
    /// `∫_{a_j} |B|^p dP ≤ C y_j^p`.
    pub fn check_b_bound(&self, c: f64) -> Result<BBoundReport> {
        let tree = self.b.tree().clone();
        let depth = tree.depth();
        let terminal = self.martingale.terminal();
        let signed_tail = self.b.zip_with(
            &RandomVariable::from_parts(tree.clone(), depth, self.b_sign.clone()),
            |m, s| m * s,
        )?;
        // relative to the whole potential: a tail that vanishes exactly is
        // computed as rounding noise
        let scale = signed_tail.sup_norm().max(self.potential.sup_norm());
        let mut identity_error = 0.0_f64;
        let mut pairs = Vec::with_capacity(self.atoms());
        for (j, &pj) in self.probs.iter().enumerate() {
            let sub = tree.subtree(1, j)?;
            let g = terminal.restrict(&sub)?;
            let conditional = conj_riesz(&g, self.alpha, depth - 1)?.value;
            let expected = conditional.scale(pj.powf(self.alpha));
            let local = signed_tail.restrict(&sub)?;
            let diff = local
                .values()
                .iter()
                .zip(expected.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            identity_error = identity_error.max(if scale > 0.0 { diff / scale } else { diff });

            let integral: f64 = sub.map[depth - 1]
                .iter()
                .map(|&i| tree.prob(depth, i) * self.b.values()[i].powf(self.p))
                .sum();
            pairs.push((integral, c * self.y[j].powf(self.p)));
        }
        let bound_scale = pairs.iter().fold(0.0_f64, |m, &(l, r)| m.max(l).max(r));
        Ok(BBoundReport {
            identity_error,
            bound: Report::from_pairs("B-bound", pairs, bound_scale),
        })
    }
}
