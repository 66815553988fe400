use thiserror::Error;

use crate::filtration::TreeViolation;
use crate::params::ParamsError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} is out of range for a tree of depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("atom {atom} does not exist at level {level}")]
    AtomOutOfRange { level: usize, atom: usize },
    #[error("random variables are defined on different trees")]
    TreeMismatch,
    #[error("expected {expected} values at level {level}, found {found}")]
    LengthMismatch {
        level: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },
    #[error("invalid tree: {0}")]
    InvalidTree(#[from] TreeViolation),
    #[error("norm exponent must be at least 1, got {0}")]
    NormExponent(f64),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("martingale process has no steps")]
    EmptyProcess,
    #[error("step {step} is measurable at level {level}, expected level {step}")]
    StepLevel { step: usize, level: usize },
    #[error("tower property fails at step {step} (relative error {error:e})")]
    NotAMartingale { step: usize, error: f64 },
    #[error("the single-step decomposition needs a tree of depth at least 1")]
    DepthZero,
    #[error("invalid inequality instance: {0}")]
    InvalidInstance(&'static str),
    #[error("condition {condition} fails at index {index}: {lhs} > {rhs}")]
    ConditionViolated {
        condition: &'static str,
        index: usize,
        lhs: f64,
        rhs: f64,
    },
    #[error("invalid chain: {0}")]
    InvalidChain(&'static str),
    #[error("closed form disagrees with the operator at depth {depth} (relative error {error:e})")]
    ClosedFormMismatch { depth: usize, error: f64 },
    #[error("search configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("the split inequalities need x_j = y_j (index {index})")]
    NotReduced { index: usize },
}
