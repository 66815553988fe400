//! The four-sequence inequality, the non-singularity lemma, and randomized
//! searches for the constants they leave unspecified.

pub mod conditions;
mod instance;
mod nonsing;
mod numineq;
pub mod search;

pub use instance::{nonsingular_draw, InequalityInstance, InstanceGenerator};
pub use nonsing::{
    check_split_inequalities, nonsing_gap, raise_x_to_y, reduce_to_nonsingular, reduced_is_nonsingular, NonsingGap,
    SplitRatios,
};
pub use numineq::{
    check_numineq, min_constant, minimal_constant, power_gap, ConstantEstimate, NumIneqOutcome, NumIneqSums,
    BISECTION_STEPS, HOLDS_TOLERANCE,
};
pub use search::{
    estimate_operator_norm, NormEstimate, NormSearch, Normalization, RestartOutcome, SearchConfig, TreeCorpus,
};
