//! The martingale Riesz potential and its formal adjoint.
//!
//! ```text
//! I_α F  = Σ_{n=1}^{N} M_n (E_n − E_{n−1}) F
//! I'_α F = Σ_{n=1}^{N} (E_n − E_{n−1}) M_n F = Σ_{n=1}^{N} (E_n − E_{n−1}) M_n F_n
//! ```
//!
//! Both are evaluated in one pass over the levels. The `n`-th partial sum is
//! kept at level `n`. For `I'_α` the partial sums form the martingale of the
//! full value: `E_n I'_α F` is the `n`-th partial sum.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::Result;
use crate::filtration::variable_ops::{average_values, lift_values};
use crate::filtration::{MartingaleProcess, RandomVariable};

#[derive(Debug, Clone)]
pub struct RieszResult {
    /// The truncated potential, measurable at level `N`.
    pub value: RandomVariable,
    /// `partials[n]` is the sum of the first `n` terms, at level `n`.
    pub partials: Vec<RandomVariable>,
}

fn weights(tree: &crate::FiltrationTree, n: usize, alpha: f64) -> Vec<f64> {
    tree.probabilities(n).map(|p| p.powf(alpha)).collect()
}

/// `Σ_{n=1}^{N} M_n (F_n − F_{n−1})` with `F_n = E_n f`.
pub fn riesz(f: &RandomVariable, alpha: f64, n_terms: usize) -> Result<RieszResult> {
    let tree = f.tree().clone();
    tree.check_level(n_terms)?;
    let top = f.condition(n_terms)?;
    let process = MartingaleProcess::from_terminal(&top);
    let mut acc = alloc::vec![0.0];
    let mut partials = Vec::with_capacity(n_terms + 1);
    partials.push(RandomVariable::from_parts(tree.clone(), 0, acc.clone()));
    for n in 1..=n_terms {
        let prev = lift_values(&tree, n - 1, n, process.step(n - 1).values());
        acc = lift_values(&tree, n - 1, n, &acc);
        for ((s, w), (cur, old)) in acc
            .iter_mut()
            .zip(weights(&tree, n, alpha))
            .zip(process.step(n).values().iter().zip(&prev))
        {
            *s += w * (cur - old);
        }
        partials.push(RandomVariable::from_parts(tree.clone(), n, acc.clone()));
    }
    Ok(RieszResult {
        value: partials.last().unwrap().clone(),
        partials,
    })
}

/// `Σ_{n=1}^{N} (E_n − E_{n−1}) M_n f`.
pub fn conj_riesz(f: &RandomVariable, alpha: f64, n_terms: usize) -> Result<RieszResult> {
    let tree = f.tree().clone();
    tree.check_level(n_terms)?;
    let top = f.condition(n_terms)?;
    let process = MartingaleProcess::from_terminal(&top);
    let mut acc = alloc::vec![0.0];
    let mut partials = Vec::with_capacity(n_terms + 1);
    partials.push(RandomVariable::from_parts(tree.clone(), 0, acc.clone()));
    for n in 1..=n_terms {
        // M_n F_n, then its average over F_{n−1}
        let weighted: Vec<f64> = weights(&tree, n, alpha)
            .iter()
            .zip(process.step(n).values())
            .map(|(w, v)| w * v)
            .collect();
        let coarse = lift_values(&tree, n - 1, n, &average_values(&tree, n, n - 1, &weighted));
        acc = lift_values(&tree, n - 1, n, &acc);
        for (s, (w, c)) in acc.iter_mut().zip(weighted.iter().zip(&coarse)) {
            *s += w - c;
        }
        partials.push(RandomVariable::from_parts(tree.clone(), n, acc.clone()));
    }
    Ok(RieszResult {
        value: partials.last().unwrap().clone(),
        partials,
    })
}

/// `|⟨I_α f, g⟩ − ⟨f, I'_α g⟩|` with both potentials truncated at `N`.
pub fn duality_gap(f: &RandomVariable, g: &RandomVariable, alpha: f64, n_terms: usize) -> Result<f64> {
    let left = riesz(f, alpha, n_terms)?.value.inner(g)?;
    let right = f.inner(&conj_riesz(g, alpha, n_terms)?.value)?;
    Ok((left - right).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{relative_sup_error, FiltrationTree};
    use alloc::sync::Arc;
    use alloc::vec;

    const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn two_atom_values() {
        let t = Arc::new(FiltrationTree::one_step(&[0.5, 0.5]).unwrap());
        let f = RandomVariable::new(t, 1, vec![2.0, 0.0]).unwrap();
        let r = riesz(&f, 0.5, 1).unwrap().value;
        let c = conj_riesz(&f, 0.5, 1).unwrap().value;
        for v in [r.values(), c.values()] {
            assert!((v[0] - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((v[1] + FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_zero_telescopes() {
        let t = Arc::new(FiltrationTree::random(&mut crate::rng::stream(11, 0), 4, 4));
        let vals = (0..t.leaf_count()).map(|i| (i as f64).sin()).collect();
        let f = RandomVariable::new(t, 4, vals).unwrap();
        let expected = f.sub(&f.condition(0).unwrap()).unwrap();
        for out in [riesz(&f, 0.0, 4).unwrap(), conj_riesz(&f, 0.0, 4).unwrap()] {
            assert!(relative_sup_error(out.value.values(), expected.values()) < 1e-13);
        }
    }

    #[test]
    fn riesz_of_constant_vanishes() {
        let t = Arc::new(FiltrationTree::random(&mut crate::rng::stream(11, 1), 3, 4));
        let f = RandomVariable::constant(t, 3, 4.0).unwrap();
        let r = riesz(&f, 0.3, 3).unwrap();
        assert!(r.value.sup_norm() < 1e-13);
    }

    #[test]
    fn truncation_beyond_depth_is_an_error() {
        let t = Arc::new(FiltrationTree::uniform(2, 2));
        let f = RandomVariable::constant(t, 2, 1.0).unwrap();
        assert!(riesz(&f, 0.5, 3).is_err());
        assert!(conj_riesz(&f, 0.5, 3).is_err());
    }

    #[test]
    fn shallow_truncation_uses_conditioned_input() {
        let t = Arc::new(FiltrationTree::random(&mut crate::rng::stream(11, 2), 4, 3));
        let vals = (0..t.leaf_count()).map(|i| (i as f64 * 0.7).cos()).collect();
        let f = RandomVariable::new(t, 4, vals).unwrap();
        let r = conj_riesz(&f, 0.5, 2).unwrap();
        assert_eq!(r.value.level(), 2);
        assert_eq!(r.partials.len(), 3);
    }
}
