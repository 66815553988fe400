//! Randomized lower bounds on operator norms.
//!
//! Each restart draws its own tree and starting variable from the stream
//! `(seed, restart)` and hill-climbs by multiplying one leaf value at a time
//! by `exp(σ z)`, flipping its sign now and then, keeping only improvements.
//! The estimate is the best ratio over all restarts, so it never decreases
//! as the trial budget grows.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use crate::counterexample::{build_chain, ChainSpec};
use crate::error::{Error, Result};
use crate::filtration::{FiltrationTree, MartingaleProcess, RandomVariable};
use crate::params::{NormMode, Params};
use crate::riesz::{conj_riesz, riesz};
use crate::rng;

/// Probability that a step also flips the sign of the coordinate.
const SIGN_FLIP_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    pub seed: u64,
    /// Total number of ratio evaluations, shared out across restarts.
    pub trials: u64,
    pub restarts: u64,
    /// `σ` in the multiplicative step `exp(σ z)`.
    pub perturbation: f64,
    /// Trees have depth uniform in `[1, depth]`.
    pub depth: usize,
    pub branch_max: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10_000,
            restarts: 20,
            perturbation: 0.5,
            depth: 6,
            branch_max: 3,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive"));
        }
        if !(self.perturbation > 0.0 && self.perturbation.is_finite()) {
            return Err(Error::InvalidConfig("perturbation scale must be positive"));
        }
        if self.depth == 0 || self.branch_max == 0 {
            return Err(Error::InvalidConfig("depth and branching bounds must be positive"));
        }
        Ok(())
    }

    /// Evaluations given to `restart`; nondecreasing in `trials`.
    pub fn steps_for(&self, restart: u64) -> u64 {
        self.trials / self.restarts + u64::from(restart < self.trials % self.restarts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TreeCorpus {
    /// Random trees with the configured branching bound.
    Random,
    /// Chains of shrinking atoms.
    Chain,
    /// Random trees on even restarts, chains on odd ones.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Normalization {
    /// The denominator of the mode's estimate: `‖F‖_p`, `‖F‖_r` or `‖F^*‖_1`.
    Native,
    /// `‖F‖_1`.
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSearch {
    pub mode: NormMode,
    pub params: Params,
    pub corpus: TreeCorpus,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RestartOutcome {
    pub restart: u64,
    pub best: f64,
    pub depth: usize,
    pub leaves: usize,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormEstimate {
    pub estimate: f64,
    pub best_restart: Option<u64>,
    pub restarts: Vec<RestartOutcome>,
}

impl NormEstimate {
    /// Ordered max-reduction; ties go to the earliest restart.
    pub fn combine(restarts: Vec<RestartOutcome>) -> Self {
        let mut estimate = 0.0;
        let mut best_restart = None;
        for r in &restarts {
            if best_restart.is_none() || r.best > estimate {
                estimate = r.best;
                best_restart = Some(r.restart);
            }
        }
        Self {
            estimate,
            best_restart,
            restarts,
        }
    }
}

impl NormSearch {
    /// Fails unless `params` satisfies the exponent relation of `mode`.
    pub fn new(mode: NormMode, params: Params) -> Result<Self> {
        params.with_alpha(mode, params.alpha)?;
        if !params.is_consistent() {
            return Err(Error::InvalidConfig("p and p' are not conjugate"));
        }
        Ok(Self {
            mode,
            params,
            corpus: TreeCorpus::Random,
            normalization: Normalization::Native,
        })
    }

    pub fn with_corpus(mut self, corpus: TreeCorpus) -> Self {
        self.corpus = corpus;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// `‖T F‖ / ‖F‖` for the mode's operator `T`; zero when `‖F‖ = 0`.
    pub fn ratio(&self, f: &RandomVariable) -> Result<f64> {
        let depth = f.level();
        let alpha = self.params.alpha;
        let (numerator, native) = match self.mode {
            NormMode::Hls => {
                let q = self.params.q.ok_or(Error::InvalidConfig("hls mode needs q"))?;
                (riesz(f, alpha, depth)?.value.lp_norm(q)?, f.lp_norm(self.params.p)?)
            }
            NormMode::Bmo => {
                let r = self.params.r.ok_or(Error::InvalidConfig("bmo mode needs r"))?;
                let value = riesz(f, alpha, depth)?.value;
                (MartingaleProcess::from_terminal(&value).bmo_norm(), f.lp_norm(r)?)
            }
            NormMode::Conjugate => {
                let value = conj_riesz(f, alpha, depth)?.value;
                let h1 = match self.normalization {
                    Normalization::Native => MartingaleProcess::from_terminal(f).h1_norm(),
                    Normalization::L1 => 0.0,
                };
                (value.lp_norm(self.params.p)?, h1)
            }
        };
        let denominator = match self.normalization {
            Normalization::Native => native,
            Normalization::L1 => f.lp_norm(1.0)?,
        };
        Ok(if denominator > 0.0 {
            numerator / denominator
        } else {
            0.0
        })
    }

    fn draw_tree<R: Rng + ?Sized>(&self, rng: &mut R, cfg: &SearchConfig, restart: u64) -> Result<FiltrationTree> {
        let depth = rng.random_range(1..=cfg.depth);
        let chain = match self.corpus {
            TreeCorpus::Random => false,
            TreeCorpus::Chain => true,
            TreeCorpus::Mixed => restart % 2 == 1,
        };
        if chain {
            build_chain(&ChainSpec::random(rng, depth))
        } else {
            Ok(FiltrationTree::random(rng, depth, cfg.branch_max))
        }
    }

    /// One hill-climbing run; independent of every other restart.
    pub fn run_restart(&self, cfg: &SearchConfig, restart: u64) -> Result<RestartOutcome> {
        let mut rng = rng::stream(cfg.seed, restart);
        let tree = Arc::new(self.draw_tree(&mut rng, cfg, restart)?);
        let depth = tree.depth();
        let leaves = tree.leaf_count();
        let mut values: Vec<f64> = if restart % 4 < 2 {
            (0..leaves).map(|_| rng::normal(&mut rng)).collect()
        } else {
            // a spike on one leaf over a faint background
            let spike = rng.random_range(0..leaves);
            (0..leaves)
                .map(|i| if i == spike { 1.0 } else { 1e-3 * rng::normal(&mut rng) })
                .collect()
        };
        let steps = cfg.steps_for(restart);
        let mut outcome = RestartOutcome {
            restart,
            best: 0.0,
            depth,
            leaves,
            evaluations: 0,
        };
        if steps == 0 {
            return Ok(outcome);
        }
        outcome.best = self.ratio(&RandomVariable::new(tree.clone(), depth, values.clone())?)?;
        outcome.evaluations = 1;
        for _ in 1..steps {
            let i = rng.random_range(0..leaves);
            let old = values[i];
            let z = rng::normal(&mut rng);
            let mut proposal = if old == 0.0 {
                let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
                cfg.perturbation * z * scale
            } else {
                old * (cfg.perturbation * z).exp()
            };
            if rng.random::<f64>() < SIGN_FLIP_SHARE {
                proposal = -proposal;
            }
            values[i] = proposal;
            let ratio = self.ratio(&RandomVariable::new(tree.clone(), depth, values.clone())?)?;
            outcome.evaluations += 1;
            if ratio > outcome.best {
                outcome.best = ratio;
            } else {
                values[i] = old;
            }
        }
        Ok(outcome)
    }

    /// Serial search over every restart.
    pub fn estimate(&self, cfg: &SearchConfig) -> Result<NormEstimate> {
        cfg.validate()?;
        let restarts = (0..cfg.restarts)
            .map(|r| self.run_restart(cfg, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(NormEstimate::combine(restarts))
    }
}

/// Best ratio found for `mode` with its native normalization on random trees.
pub fn estimate_operator_norm(mode: NormMode, params: Params, cfg: &SearchConfig) -> Result<f64> {
    Ok(NormSearch::new(mode, params)?.estimate(cfg)?.estimate)
}
