use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::FiltrationTree;
use crate::error::{Error, Result};

/// A random variable measurable with respect to `F_level`: one value per
/// atom of that level.
///
/// Operations between variables of different levels lift the shallower one
/// by copying each atom's value onto its descendants.
#[derive(Debug, Clone)]
pub struct RandomVariable {
    tree: Arc<FiltrationTree>,
    level: usize,
    values: Vec<f64>,
}

/// Copies values at `from` down to the atoms of `to ≥ from`.
pub(crate) fn lift_values(tree: &FiltrationTree, from: usize, to: usize, values: &[f64]) -> Vec<f64> {
    let mut current = values.to_vec();
    for l in from + 1..=to {
        current = tree.level(l).iter().map(|a| current[a.parent]).collect();
    }
    current
}

/// Conditional expectation of values at `from` onto `to ≤ from`.
pub(crate) fn average_values(tree: &FiltrationTree, from: usize, to: usize, values: &[f64]) -> Vec<f64> {
    let mut current = values.to_vec();
    for l in (to + 1..=from).rev() {
        let parents = tree.level(l - 1);
        let mut acc = vec![0.0; parents.len()];
        for (a, v) in tree.level(l).iter().zip(&current) {
            acc[a.parent] += a.prob * v;
        }
        for (s, a) in acc.iter_mut().zip(parents) {
            *s /= a.prob;
        }
        current = acc;
    }
    current
}

impl RandomVariable {
    pub fn new(tree: Arc<FiltrationTree>, level: usize, values: Vec<f64>) -> Result<Self> {
        tree.check_level(level)?;
        let expected = tree.atom_count(level);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                level,
                expected,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { tree, level, values })
    }

    pub(crate) fn from_parts(tree: Arc<FiltrationTree>, level: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), tree.atom_count(level));
        Self { tree, level, values }
    }

    pub fn constant(tree: Arc<FiltrationTree>, level: usize, c: f64) -> Result<Self> {
        tree.check_level(level)?;
        let n = tree.atom_count(level);
        Ok(Self::from_parts(tree, level, vec![c; n]))
    }

    pub fn zeros(tree: Arc<FiltrationTree>, level: usize) -> Result<Self> {
        Self::constant(tree, level, 0.0)
    }

    /// `1_a` for the atom `atom` of `F_level`.
    pub fn indicator(tree: Arc<FiltrationTree>, level: usize, atom: usize) -> Result<Self> {
        let mut v = Self::zeros(tree, level)?;
        if atom >= v.values.len() {
            return Err(Error::AtomOutOfRange { level, atom });
        }
        v.values[atom] = 1.0;
        Ok(v)
    }

    /// `b_level^α`: each atom's probability raised to `alpha`.
    pub fn atom_weights(tree: Arc<FiltrationTree>, level: usize, alpha: f64) -> Result<Self> {
        tree.check_level(level)?;
        let values = tree.probabilities(level).map(|p| p.powf(alpha)).collect();
        Ok(Self::from_parts(tree, level, values))
    }

    pub fn tree(&self) -> &Arc<FiltrationTree> {
        &self.tree
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_tree(&self, other: &RandomVariable) -> bool {
        Arc::ptr_eq(&self.tree, &other.tree) || *self.tree == *other.tree
    }

    fn ensure_same_tree(&self, other: &RandomVariable) -> Result<()> {
        if self.same_tree(other) {
            Ok(())
        } else {
            Err(Error::TreeMismatch)
        }
    }

    /// The same variable expressed at the deeper level `n`.
    pub fn lift(&self, n: usize) -> Result<Self> {
        self.tree.check_level(n)?;
        if n < self.level {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.tree.depth(),
            });
        }
        let values = lift_values(&self.tree, self.level, n, &self.values);
        Ok(Self::from_parts(self.tree.clone(), n, values))
    }

    /// `E_n f`. For `n` at or beyond the measurability level this is the
    /// lift of `f` to level `n`.
    pub fn condition(&self, n: usize) -> Result<Self> {
        self.tree.check_level(n)?;
        if n >= self.level {
            return self.lift(n);
        }
        let values = average_values(&self.tree, self.level, n, &self.values);
        Ok(Self::from_parts(self.tree.clone(), n, values))
    }

    /// `M_n f = b_n^α f`, evaluated at level `max(level, n)`.
    pub fn multiply(&self, n: usize, alpha: f64) -> Result<Self> {
        self.tree.check_level(n)?;
        let target = self.level.max(n);
        let weights = lift_values(
            &self.tree,
            n,
            target,
            &self.tree.probabilities(n).map(|p| p.powf(alpha)).collect::<Vec<_>>(),
        );
        let mut values = lift_values(&self.tree, self.level, target, &self.values);
        values.iter_mut().zip(&weights).for_each(|(v, w)| *v *= w);
        Ok(Self::from_parts(self.tree.clone(), target, values))
    }

    /// Lifts both variables to their common deeper level and combines them
    /// pointwise.
    pub fn zip_with(&self, other: &RandomVariable, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_tree(other)?;
        let level = self.level.max(other.level);
        let a = lift_values(&self.tree, self.level, level, &self.values);
        let b = lift_values(&self.tree, other.level, level, &other.values);
        let values = a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect();
        Ok(Self::from_parts(self.tree.clone(), level, values))
    }

    pub fn add(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &RandomVariable) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(
            self.tree.clone(),
            self.level,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// `E(f g)`.
    pub fn inner(&self, other: &RandomVariable) -> Result<f64> {
        self.ensure_same_tree(other)?;
        let level = self.level.max(other.level);
        let a = lift_values(&self.tree, self.level, level, &self.values);
        let b = lift_values(&self.tree, other.level, level, &other.values);
        Ok(self
            .tree
            .probabilities(level)
            .zip(a.iter().zip(&b))
            .map(|(p, (x, y))| p * x * y)
            .sum())
    }

    pub fn expectation(&self) -> f64 {
        self.tree
            .probabilities(self.level)
            .zip(&self.values)
            .map(|(p, v)| p * v)
            .sum()
    }

    /// `‖f‖_p^p = E|f|^p`.
    pub fn lp_norm_pow(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::NormExponent(p));
        }
        Ok(self
            .tree
            .probabilities(self.level)
            .zip(&self.values)
            .map(|(w, v)| w * v.abs().powf(p))
            .sum())
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let s = self.lp_norm_pow(p)?;
        Ok(if p == 1.0 { s } else { s.powf(1.0 / p) })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Restriction to the conditional subtree `sub`, expressed at the same
    /// absolute level shifted to the subtree's numbering.
    pub fn restrict(&self, sub: &super::Subtree) -> Result<Self> {
        if self.level < sub.root_level {
            return Err(Error::LevelOutOfRange {
                level: self.level,
                depth: sub.root_level,
            });
        }
        let k = self.level - sub.root_level;
        let values = sub.map[k].iter().map(|&i| self.values[i]).collect();
        Ok(Self::from_parts(Arc::new(sub.tree.clone()), k, values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{relative_sup_error, Atom};

    fn two_atoms() -> Arc<FiltrationTree> {
        Arc::new(FiltrationTree::one_step(&[0.5, 0.5]).unwrap())
    }

    #[test]
    fn conditioning_two_atoms() {
        let t = two_atoms();
        let f = RandomVariable::new(t.clone(), 1, vec![2.0, 0.0]).unwrap();
        let e0 = f.condition(0).unwrap();
        assert_eq!(e0.values(), &[1.0]);
        assert_eq!(f.condition(1).unwrap().values(), f.values());
    }

    #[test]
    fn constants_are_fixed_by_averaging() {
        let t = Arc::new(FiltrationTree::random(&mut crate::rng::stream(3, 0), 4, 4));
        let c = RandomVariable::constant(t.clone(), 4, -2.5).unwrap();
        for n in 0..=4 {
            let e = c.condition(n).unwrap();
            assert!(e.values().iter().all(|v| (v + 2.5).abs() < 1e-13));
        }
    }

    #[test]
    fn multiply_two_atoms() {
        let t = two_atoms();
        let f = RandomVariable::new(t.clone(), 1, vec![2.0, 0.0]).unwrap();
        let m = f.multiply(1, 0.5).unwrap();
        assert!((m.values()[0] - 1.414_213_562_373_095).abs() < 1e-15);
        assert_eq!(m.values()[1], 0.0);
        assert_eq!(f.multiply(1, 0.0).unwrap().values(), f.values());
        // M_0 multiplies by 1 and keeps the level
        let m0 = f.multiply(0, 0.7).unwrap();
        assert_eq!(m0.level(), 1);
        assert_eq!(m0.values(), f.values());
    }

    #[test]
    fn inner_products() {
        let t = two_atoms();
        let one = RandomVariable::constant(t.clone(), 0, 1.0).unwrap();
        assert_eq!(one.inner(&one).unwrap(), 1.0);
        let f = RandomVariable::new(t.clone(), 1, vec![2.0, -1.0]).unwrap();
        assert_eq!(f.inner(&f).unwrap(), 2.5);
        let z = RandomVariable::zeros(t, 1).unwrap();
        assert_eq!(z.inner(&z).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_trees_are_rejected() {
        let a = RandomVariable::constant(two_atoms(), 1, 1.0).unwrap();
        let b = RandomVariable::constant(Arc::new(FiltrationTree::uniform(1, 3)), 1, 1.0).unwrap();
        assert_eq!(a.inner(&b), Err(Error::TreeMismatch));
        // structurally equal trees behind different handles are fine
        let c = RandomVariable::constant(two_atoms(), 1, 1.0).unwrap();
        assert!(a.inner(&c).is_ok());
    }

    #[test]
    fn level_and_length_errors() {
        let t = two_atoms();
        assert!(matches!(
            RandomVariable::new(t.clone(), 2, vec![]),
            Err(Error::LevelOutOfRange { level: 2, depth: 1 })
        ));
        assert!(matches!(
            RandomVariable::new(t.clone(), 1, vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        let f = RandomVariable::new(t, 1, vec![1.0, 2.0]).unwrap();
        assert!(f.condition(3).is_err());
        assert!(f.multiply(2, 0.5).is_err());
        assert_eq!(f.lp_norm(0.5), Err(Error::NormExponent(0.5)));
    }

    #[test]
    fn indicator_norm() {
        let t = Arc::new(
            FiltrationTree::new(vec![
                vec![Atom::new(1.0, 0)],
                vec![Atom::new(0.2, 0), Atom::new(0.8, 0)],
            ])
            .unwrap(),
        );
        let ind = RandomVariable::indicator(t, 1, 0).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((ind.lp_norm(p).unwrap() - 0.2_f64.powf(1.0 / p)).abs() < 1e-15);
        }
    }

    #[test]
    fn lift_then_condition_round_trips() {
        let t = Arc::new(FiltrationTree::random(&mut crate::rng::stream(9, 1), 3, 3));
        let f = RandomVariable::new(t.clone(), 1, (0..t.atom_count(1)).map(|i| i as f64 - 0.5).collect()).unwrap();
        let back = f.lift(3).unwrap().condition(1).unwrap();
        assert!(relative_sup_error(back.values(), f.values()) < 1e-13);
    }
}
