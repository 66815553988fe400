use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::variable::{average_values, lift_values};
use super::{relative_sup_error, RandomVariable};
use crate::error::{Error, Result};

/// Tolerance of the tower check in [`MartingaleProcess::new`].
const TOWER_TOLERANCE: f64 = 1e-9;

/// `F_0, …, F_N` with `F_n` measurable at level `n` and
/// `E_{n−1} F_n = F_{n−1}`.
#[derive(Debug, Clone)]
pub struct MartingaleProcess {
    steps: Vec<RandomVariable>,
}

impl MartingaleProcess {
    /// Checks levels, tree identity and the tower property.
    pub fn new(steps: Vec<RandomVariable>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyProcess);
        }
        for (n, step) in steps.iter().enumerate() {
            if step.level() != n {
                return Err(Error::StepLevel {
                    step: n,
                    level: step.level(),
                });
            }
            if !step.same_tree(&steps[0]) {
                return Err(Error::TreeMismatch);
            }
        }
        let process = Self { steps };
        if let Some((step, error)) = process.worst_tower_error().filter(|&(_, e)| e > TOWER_TOLERANCE) {
            return Err(Error::NotAMartingale { step, error });
        }
        Ok(process)
    }

    /// `F_n = E_n f` for `n = 0, …, level(f)`.
    pub fn from_terminal(f: &RandomVariable) -> Self {
        let tree = f.tree();
        let mut steps = Vec::with_capacity(f.level() + 1);
        steps.push(f.clone());
        for n in (0..f.level()).rev() {
            let values = average_values(tree, n + 1, n, steps.last().unwrap().values());
            steps.push(RandomVariable::from_parts(tree.clone(), n, values));
        }
        steps.reverse();
        Self { steps }
    }

    /// Index `N` of the last step.
    pub fn horizon(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn steps(&self) -> &[RandomVariable] {
        &self.steps
    }

    pub fn step(&self, n: usize) -> &RandomVariable {
        &self.steps[n]
    }

    pub fn terminal(&self) -> &RandomVariable {
        self.steps.last().unwrap()
    }

    /// Largest relative error of `E_{n−1} F_n = F_{n−1}` and the step where
    /// it occurs.
    pub fn worst_tower_error(&self) -> Option<(usize, f64)> {
        (1..self.steps.len())
            .map(|n| {
                let tree = self.steps[n].tree();
                let avg = average_values(tree, n, n - 1, self.steps[n].values());
                (n, relative_sup_error(&avg, self.steps[n - 1].values()))
            })
            .fold(None, |best, cur| match best {
                Some((_, e)) if e >= cur.1 => best,
                _ => Some(cur),
            })
    }

    /// `F^* = sup_n |F_n|`, at level `N`.
    pub fn maximal_function(&self) -> RandomVariable {
        let tree = self.terminal().tree();
        let n_max = self.horizon();
        let mut running = self.steps[0].values().iter().map(|v| v.abs()).collect::<Vec<_>>();
        for n in 1..=n_max {
            running = lift_values(tree, n - 1, n, &running);
            running
                .iter_mut()
                .zip(self.steps[n].values())
                .for_each(|(m, v)| *m = m.max(v.abs()));
        }
        RandomVariable::from_parts(tree.clone(), n_max, running)
    }

    /// `‖F^*‖_1`.
    pub fn h1_norm(&self) -> f64 {
        self.maximal_function().expectation()
    }

    /// `sup_n sup_{a ∈ F_n} E((F_N − E(F_N | a))² | a)^{1/2}`.
    pub fn bmo_norm(&self) -> f64 {
        let tree = self.terminal().tree();
        let n_max = self.horizon();
        let terminal = self.terminal().values();
        let mut best = 0.0_f64;
        for n in 0..n_max {
            let mean = lift_values(tree, n, n_max, self.steps[n].values());
            let sq: Vec<f64> = terminal.iter().zip(&mean).map(|(f, m)| (f - m) * (f - m)).collect();
            let var = average_values(tree, n_max, n, &sq);
            best = var.iter().fold(best, |b, v| b.max(*v));
        }
        best.sqrt()
    }
}
