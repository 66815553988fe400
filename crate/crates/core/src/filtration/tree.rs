use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Relative tolerance for probability conservation when a tree is built.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// An atom of `F_n`: its probability and the index of the atom of `F_{n−1}`
/// containing it. The root's parent is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Atom {
    pub prob: f64,
    pub parent: usize,
}

impl Atom {
    pub fn new(prob: f64, parent: usize) -> Self {
        Self { prob, parent }
    }
}

/// The first invariant a candidate tree violates.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeViolation {
    NoLevels,
    RootCount {
        found: usize,
    },
    RootProbability {
        prob: f64,
    },
    EmptyLevel {
        level: usize,
    },
    NonPositiveProbability {
        level: usize,
        atom: usize,
        prob: f64,
    },
    ParentOutOfRange {
        level: usize,
        atom: usize,
        parent: usize,
    },
    ProbabilityConservation {
        level: usize,
        atom: usize,
        prob: f64,
        children_sum: f64,
    },
}

impl TreeViolation {
    /// Short name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            TreeViolation::NoLevels => "non-empty",
            TreeViolation::RootCount { .. } => "single-root",
            TreeViolation::RootProbability { .. } => "root-probability-one",
            TreeViolation::EmptyLevel { .. } => "non-empty-level",
            TreeViolation::NonPositiveProbability { .. } => "positive-probability",
            TreeViolation::ParentOutOfRange { .. } => "parent-in-range",
            TreeViolation::ProbabilityConservation { .. } => "probability-conservation",
        }
    }
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.invariant())?;
        match *self {
            TreeViolation::NoLevels => write!(f, "tree has no levels"),
            TreeViolation::RootCount { found } => {
                write!(f, "level 0 must contain exactly one atom, found {found}")
            }
            TreeViolation::RootProbability { prob } => {
                write!(f, "the root atom must have probability 1, found {prob}")
            }
            TreeViolation::EmptyLevel { level } => write!(f, "level {level} has no atoms"),
            TreeViolation::NonPositiveProbability { level, atom, prob } => {
                write!(f, "atom {atom} at level {level} has probability {prob}")
            }
            TreeViolation::ParentOutOfRange { level, atom, parent } => {
                write!(f, "atom {atom} at level {level} names missing parent {parent}")
            }
            TreeViolation::ProbabilityConservation {
                level,
                atom,
                prob,
                children_sum,
            } => write!(
                f,
                "children of atom {atom} at level {level} sum to {children_sum}, expected {prob}"
            ),
        }
    }
}

impl core::error::Error for TreeViolation {}

/// A finite filtration stored level by level. Level `n` lists the atoms
/// generating `F_n`; every atom of level `n + 1` points at the atom of level
/// `n` it refines. An atom may have a single child (it is not split).
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationTree {
    levels: Vec<Vec<Atom>>,
}

/// A conditional subtree `(a, F ∩ 2^a, P|_a / P(a))` rooted at one atom.
/// `map[k]` lists, for each atom at subtree level `k`, its index at level
/// `root_level + k` of the parent tree.
#[derive(Debug, Clone)]
pub struct Subtree {
    pub tree: FiltrationTree,
    pub root_level: usize,
    pub root_atom: usize,
    pub map: Vec<Vec<usize>>,
}

impl FiltrationTree {
    /// Validates and wraps `levels`.
    pub fn new(levels: Vec<Vec<Atom>>) -> core::result::Result<Self, TreeViolation> {
        validate(&levels)?;
        Ok(Self { levels })
    }

    /// The trivial filtration `{∅, Ω}` with no steps.
    pub fn trivial() -> Self {
        Self {
            levels: vec![vec![Atom::new(1.0, 0)]],
        }
    }

    /// Every atom splits into `branching` children of equal probability.
    pub fn uniform(depth: usize, branching: usize) -> Self {
        assert!(branching >= 1, "branching must be positive");
        let mut levels = vec![vec![Atom::new(1.0, 0)]];
        for _ in 0..depth {
            let prev = levels.last().unwrap();
            let next = prev
                .iter()
                .enumerate()
                .flat_map(|(i, a)| (0..branching).map(move |_| Atom::new(a.prob / branching as f64, i)))
                .collect();
            levels.push(next);
        }
        Self { levels }
    }

    /// Two-level tree with the given level-1 probabilities.
    pub fn one_step(probs: &[f64]) -> core::result::Result<Self, TreeViolation> {
        Self::new(vec![
            vec![Atom::new(1.0, 0)],
            probs.iter().map(|&p| Atom::new(p, 0)).collect(),
        ])
    }

    /// Random tree of exactly `depth` steps: each atom gets between 1 and
    /// `branch_max` children whose shares come from normalized exponential
    /// draws.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, depth: usize, branch_max: usize) -> Self {
        assert!(branch_max >= 1, "branch_max must be positive");
        let mut levels = vec![vec![Atom::new(1.0, 0)]];
        for _ in 0..depth {
            let prev = levels.last().unwrap();
            let mut next = Vec::new();
            for (i, atom) in prev.iter().enumerate() {
                let k = rng.random_range(1..=branch_max);
                if k == 1 {
                    next.push(Atom::new(atom.prob, i));
                    continue;
                }
                for w in rng::simplex(rng, k) {
                    next.push(Atom::new(atom.prob * w, i));
                }
            }
            levels.push(next);
        }
        Self { levels }
    }

    /// Number of steps `N`; levels run from 0 to `N`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<Atom>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &[Atom] {
        &self.levels[n]
    }

    pub fn atom_count(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    pub fn total_atoms(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn leaf_count(&self) -> usize {
        self.levels[self.depth()].len()
    }

    pub fn prob(&self, n: usize, atom: usize) -> f64 {
        self.levels[n][atom].prob
    }

    pub fn probabilities(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        self.levels[n].iter().map(|a| a.prob)
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            Err(Error::LevelOutOfRange {
                level,
                depth: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    /// Index at `target` of the ancestor of `atom` (at `level`).
    pub fn ancestor(&self, level: usize, atom: usize, target: usize) -> usize {
        debug_assert!(target <= level);
        (target + 1..=level).rev().fold(atom, |a, l| self.levels[l][a].parent)
    }

    /// For every atom at `level`, the index of its ancestor at `target ≤ level`.
    pub fn ancestor_map(&self, level: usize, target: usize) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.atom_count(target)).collect();
        for l in target + 1..=level {
            map = self.levels[l].iter().map(|a| map[a.parent]).collect();
        }
        map
    }

    /// Indices at `target ≥ level` of the atoms contained in `atom`.
    pub fn descendants(&self, level: usize, atom: usize, target: usize) -> Vec<usize> {
        let mut inside = vec![false; self.atom_count(level)];
        inside[atom] = true;
        for l in level + 1..=target {
            inside = self.levels[l].iter().map(|a| inside[a.parent]).collect();
        }
        inside.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect()
    }

    /// The conditional tree under `atom` at `level`, with probabilities
    /// rescaled by `1 / P(atom)` and levels shifted so the atom is the root.
    pub fn subtree(&self, level: usize, atom: usize) -> Result<Subtree> {
        self.check_level(level)?;
        if atom >= self.atom_count(level) {
            return Err(Error::AtomOutOfRange { level, atom });
        }
        let scale = self.prob(level, atom);
        let mut levels = vec![vec![Atom::new(1.0, 0)]];
        let mut map = vec![vec![atom]];
        for l in level + 1..=self.depth() {
            let prev = map.last().unwrap();
            // position of each parent-level atom inside the subtree, if any
            let mut local = vec![usize::MAX; self.atom_count(l - 1)];
            for (k, &orig) in prev.iter().enumerate() {
                local[orig] = k;
            }
            let mut atoms = Vec::new();
            let mut indices = Vec::new();
            for (i, a) in self.levels[l].iter().enumerate() {
                let parent = local[a.parent];
                if parent != usize::MAX {
                    atoms.push(Atom::new(a.prob / scale, parent));
                    indices.push(i);
                }
            }
            levels.push(atoms);
            map.push(indices);
        }
        // rescaling keeps the relative conservation error of the parent tree
        let tree = FiltrationTree::new(levels)?;
        Ok(Subtree {
            tree,
            root_level: level,
            root_atom: atom,
            map,
        })
    }

    /// Sum of children probabilities minus the parent probability, worst
    /// relative case over the whole tree.
    pub fn conservation_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 1..self.levels.len() {
            let mut sums = vec![0.0; self.levels[l - 1].len()];
            for a in &self.levels[l] {
                sums[a.parent] += a.prob;
            }
            for (s, a) in sums.iter().zip(&self.levels[l - 1]) {
                worst = worst.max((s - a.prob).abs() / a.prob);
            }
        }
        worst
    }
}

fn validate(levels: &[Vec<Atom>]) -> core::result::Result<(), TreeViolation> {
    let root = levels.first().ok_or(TreeViolation::NoLevels)?;
    if root.len() != 1 {
        return Err(TreeViolation::RootCount { found: root.len() });
    }
    if !((root[0].prob - 1.0).abs() <= PROBABILITY_TOLERANCE) {
        return Err(TreeViolation::RootProbability { prob: root[0].prob });
    }
    for (level, atoms) in levels.iter().enumerate().skip(1) {
        if atoms.is_empty() {
            return Err(TreeViolation::EmptyLevel { level });
        }
        let parents = levels[level - 1].len();
        let mut sums = vec![0.0; parents];
        for (atom, a) in atoms.iter().enumerate() {
            if !(a.prob > 0.0 && a.prob.is_finite()) {
                return Err(TreeViolation::NonPositiveProbability {
                    level,
                    atom,
                    prob: a.prob,
                });
            }
            if a.parent >= parents {
                return Err(TreeViolation::ParentOutOfRange {
                    level,
                    atom,
                    parent: a.parent,
                });
            }
            sums[a.parent] += a.prob;
        }
        for (atom, (sum, parent)) in sums.iter().zip(&levels[level - 1]).enumerate() {
            if !((sum - parent.prob).abs() <= PROBABILITY_TOLERANCE * parent.prob) {
                return Err(TreeViolation::ProbabilityConservation {
                    level: level - 1,
                    atom,
                    prob: parent.prob,
                    children_sum: *sum,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_tree_shape() {
        let t = FiltrationTree::uniform(3, 2);
        assert_eq!(t.depth(), 3);
        assert_eq!(t.leaf_count(), 8);
        assert!(t.probabilities(3).all(|p| p == 0.125));
        assert_eq!(t.ancestor(3, 5, 1), 1);
        assert_eq!(t.descendants(1, 1, 3), vec![4, 5, 6, 7]);
    }

    #[test]
    fn rejects_first_violation() {
        let bad = vec![vec![Atom::new(1.0, 0)], vec![Atom::new(0.5, 0), Atom::new(0.4, 0)]];
        let err = FiltrationTree::new(bad).unwrap_err();
        assert_eq!(err.invariant(), "probability-conservation");

        let two_roots = vec![vec![Atom::new(0.5, 0), Atom::new(0.5, 0)]];
        assert_eq!(
            FiltrationTree::new(two_roots).unwrap_err(),
            TreeViolation::RootCount { found: 2 }
        );

        let zero = vec![vec![Atom::new(1.0, 0)], vec![Atom::new(1.0, 0), Atom::new(0.0, 0)]];
        assert_eq!(
            FiltrationTree::new(zero).unwrap_err().invariant(),
            "positive-probability"
        );

        let orphan = vec![vec![Atom::new(1.0, 0)], vec![Atom::new(1.0, 1)]];
        assert_eq!(FiltrationTree::new(orphan).unwrap_err().invariant(), "parent-in-range");
    }

    #[test]
    fn unsplit_atoms_are_allowed() {
        let t = FiltrationTree::new(vec![
            vec![Atom::new(1.0, 0)],
            vec![Atom::new(1.0, 0)],
            vec![Atom::new(0.25, 0), Atom::new(0.75, 0)],
        ])
        .unwrap();
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn random_trees_conserve_probability() {
        let mut r = rng::stream(42, 0);
        for depth in 0..6 {
            let t = FiltrationTree::random(&mut r, depth, 5);
            assert_eq!(t.depth(), depth);
            assert!(t.conservation_error() <= 1e-12);
            assert!(FiltrationTree::new(t.levels().to_vec()).is_ok());
        }
    }

    #[test]
    fn subtree_rescales() {
        let t = FiltrationTree::new(vec![
            vec![Atom::new(1.0, 0)],
            vec![Atom::new(0.25, 0), Atom::new(0.75, 0)],
            vec![Atom::new(0.25, 0), Atom::new(0.5, 1), Atom::new(0.25, 1)],
        ])
        .unwrap();
        let sub = t.subtree(1, 1).unwrap();
        assert_eq!(sub.tree.depth(), 1);
        assert_eq!(sub.map[1], vec![1, 2]);
        let probs: Vec<f64> = sub.tree.probabilities(1).collect();
        assert!((probs[0] - 2.0 / 3.0).abs() < 1e-15 && (probs[1] - 1.0 / 3.0).abs() < 1e-15);
    }
}
