//! A chain of shrinking atoms `Ω = a_0 ⊃ a_1 ⊃ …` with `P(a_n) = d_n` and
//! the martingale `F_n = d_n^{-1} 1_{a_n}`. Every `F_n` has `L_1` norm one,
//! while `‖I'_α F_N‖_p^p` grows without bound in `N` when `α = 1/p'`.
//!
//! On the chain the conjugate potential has the closed form
//!
//! ```text
//! I'_α F_N = Σ_{n<N} c_n 1_{a_n} + d_N^{-1/p} 1_{a_N} − 1,
//! c_n = d_n^{-1/p} − d_{n+1}^{1/p'} / d_n,
//! ```
//!
//! which is evaluated independently of the operator as a cross-check.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::filtration::{Atom, FiltrationTree, MartingaleProcess, RandomVariable};
use crate::params::conjugate_exponent;
use crate::riesz::conj_riesz;

/// Largest admissible `log2(1 / d_N)`; keeps `d_N^{-1/p}` far from overflow.
pub const MAX_LOG2_INVERSE_DEPTH_PROB: f64 = 500.0;
/// Relative agreement required between the operator and the closed form.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-9;

/// Probabilities `d_0 = 1 ≥ d_1 ≥ … ≥ d_N > 0` of the chain atoms, where each
/// step either keeps the atom (`d_{n+1} = d_n`) or at least halves it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainSpec {
    probs: Vec<f64>,
}

impl ChainSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let spec = Self { probs };
        spec.validate()?;
        Ok(spec)
    }

    /// `d_n = 2^{-n}` for `n ≤ depth`.
    pub fn dyadic(depth: usize) -> Result<Self> {
        Self::new((0..=depth).map(|n| 0.5_f64.powi(n as i32)).collect())
    }

    /// `d_n = 1`: no atom ever splits.
    pub fn constant(depth: usize) -> Self {
        Self {
            probs: vec![1.0; depth + 1],
        }
    }

    /// `d_{n+1} = r_n d_n` with each `r_n` uniform on `[1/8, 1/2]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Self {
        let mut probs = Vec::with_capacity(depth + 1);
        probs.push(1.0);
        for n in 0..depth {
            probs.push(probs[n] * rng.random_range(0.125..=0.5));
        }
        Self { probs }
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.probs;
        if d.first() != Some(&1.0) {
            return Err(Error::InvalidChain("d_0 must equal 1"));
        }
        for w in d.windows(2) {
            if !(w[1] > 0.0 && w[1].is_finite()) {
                return Err(Error::InvalidChain("probabilities must be positive"));
            }
            if w[1] != w[0] && w[1] > 0.5 * w[0] {
                return Err(Error::InvalidChain("each step must keep the atom or at least halve it"));
            }
        }
        if -d[d.len() - 1].log2() >= MAX_LOG2_INVERSE_DEPTH_PROB {
            return Err(Error::InvalidChain("d_N^{-1} must stay below 2^500"));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn splits_at(&self, n: usize) -> bool {
        self.probs[n + 1] < self.probs[n]
    }

    /// The first `depth + 1` probabilities.
    pub fn truncate(&self, depth: usize) -> Self {
        Self {
            probs: self.probs[..=depth.min(self.depth())].to_vec(),
        }
    }
}

/// Level `n` holds `a_n` at index 0 followed by the siblings split off so
/// far, oldest first. A sibling keeps a single child at every later level.
pub fn build_chain(spec: &ChainSpec) -> Result<FiltrationTree> {
    spec.validate()?;
    let d = spec.probs();
    let mut levels = vec![vec![Atom::new(1.0, 0)]];
    for n in 0..spec.depth() {
        let prev = &levels[n];
        let mut next = vec![Atom::new(d[n + 1], 0)];
        next.extend(prev.iter().enumerate().skip(1).map(|(i, a)| Atom::new(a.prob, i)));
        if spec.splits_at(n) {
            next.push(Atom::new(d[n] - d[n + 1], 0));
        }
        levels.push(next);
    }
    Ok(FiltrationTree::new(levels)?)
}

/// `F_n = d_n^{-1} 1_{a_n}` for `n ≤ N`.
pub fn chain_martingale(tree: &Arc<FiltrationTree>, spec: &ChainSpec) -> Result<MartingaleProcess> {
    if tree.depth() != spec.depth() {
        return Err(Error::InvalidChain("tree depth differs from the chain depth"));
    }
    let steps = spec
        .probs()
        .iter()
        .enumerate()
        .map(|(n, &d)| {
            if (tree.prob(n, 0) - d).abs() > 1e-12 * d {
                return Err(Error::InvalidChain("atom 0 of each level must be the chain atom"));
            }
            let mut values = vec![0.0; tree.atom_count(n)];
            values[0] = 1.0 / d;
            RandomVariable::new(tree.clone(), n, values)
        })
        .collect::<Result<Vec<_>>>()?;
    MartingaleProcess::new(steps)
}

/// `c_n = d_n^{-1/p} − d_{n+1}^{1/p'} / d_n` for `n < N`.
pub fn coefficients(spec: &ChainSpec, p: f64) -> Vec<f64> {
    let p_prime = conjugate_exponent(p);
    spec.probs()
        .windows(2)
        .map(|w| w[0].powf(-1.0 / p) - w[1].powf(1.0 / p_prime) / w[0])
        .collect()
}

/// Smallest splitting index `n` with `(1 − 2^{-1/p'}) d_n^{-1/p} > 2`.
pub fn threshold_index(spec: &ChainSpec, p: f64) -> Option<usize> {
    let factor = 1.0 - 2.0_f64.powf(-1.0 / conjugate_exponent(p));
    (0..spec.depth()).find(|&n| spec.splits_at(n) && factor * spec.probs()[n].powf(-1.0 / p) > 2.0)
}

/// The closed form of `I'_α F_N` on the level-`N` atoms of `build_chain`.
pub fn closed_form(spec: &ChainSpec, p: f64, depth: usize) -> Vec<f64> {
    let coef = coefficients(spec, p);
    let d = spec.probs();
    let mut chain_value = 0.0;
    // siblings in creation order, valued by the partial sum when split off
    let mut siblings = Vec::new();
    for n in 0..depth {
        chain_value += coef[n];
        if spec.splits_at(n) {
            siblings.push(chain_value - 1.0);
        }
    }
    let mut values = vec![chain_value + d[depth].powf(-1.0 / p) - 1.0];
    values.extend(siblings);
    values
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GrowthPoint {
    pub depth: usize,
    /// `‖I'_α F_N‖_p^p` from the operator.
    pub norm_pow: f64,
    /// The same quantity from the closed form.
    pub closed_form_norm_pow: f64,
    /// Relative sup distance between operator and closed-form values.
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GrowthCurve {
    pub p: f64,
    pub alpha: f64,
    pub points: Vec<GrowthPoint>,
    pub threshold: Option<usize>,
}

impl GrowthCurve {
    /// Least-squares slope of `‖I'_α F_N‖_p^p` against `N` over `lo ≤ N ≤ hi`.
    pub fn slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|pt| (lo..=hi).contains(&pt.depth))
            .map(|pt| (pt.depth as f64, pt.norm_pow))
            .collect();
        least_squares_slope(&pts)
    }
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `‖I'_α F_N‖_p^p` for `N = 0..=depth` with `α = 1/p'`, each point checked
/// against the closed form.
pub fn growth_curve(spec: &ChainSpec, p: f64) -> Result<GrowthCurve> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Params(crate::params::ParamsError::Exponent {
            name: "p",
            value: p,
        }));
    }
    let alpha = 1.0 / conjugate_exponent(p);
    let tree = Arc::new(build_chain(spec)?);
    let process = chain_martingale(&tree, spec)?;
    let top = spec.depth();
    let result = conj_riesz(process.terminal(), alpha, top)?;
    let mut points = Vec::with_capacity(top + 1);
    for (depth, partial) in result.partials.iter().enumerate() {
        let expected = closed_form(spec, p, depth);
        let agreement = crate::filtration::relative_sup_error(partial.values(), &expected);
        if !(agreement <= CLOSED_FORM_TOLERANCE) {
            return Err(Error::ClosedFormMismatch {
                depth,
                error: agreement,
            });
        }
        let closed = RandomVariable::new(tree.clone(), depth, expected)?;
        points.push(GrowthPoint {
            depth,
            norm_pow: partial.lp_norm_pow(p)?,
            closed_form_norm_pow: closed.lp_norm_pow(p)?,
            agreement,
        });
    }
    Ok(GrowthCurve {
        p,
        alpha,
        points,
        threshold: threshold_index(spec, p),
    })
}
