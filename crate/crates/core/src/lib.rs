//! Martingale Riesz potentials on finite filtration trees.
//!
//! A filtration `F_0 ⊂ F_1 ⊂ … ⊂ F_N` generated by finitely many atoms is
//! stored as a rooted tree: level `n` lists the atoms of `F_n` together with
//! their probabilities and parents. On top of that representation this crate
//! provides
//!
//! - conditional expectations `E_n`, the multipliers `M_n` (pointwise
//!   multiplication by `b_n^α`, the probability of the level-`n` atom), inner
//!   products and the `L_p`, `H_1` and BMO norms ([`filtration`]);
//! - the Riesz potential `I_α = Σ M_n (E_n − E_{n−1})` and its formal adjoint
//!   `I'_α = Σ (E_n − E_{n−1}) M_n` with their truncations ([`riesz`]);
//! - the single-step decomposition of a martingale into the four sequences
//!   `p_j, x_j, y_j, A_j` and the checks on them ([`single_step`]);
//! - the four-sequence numerical inequality, its constant search and the
//!   randomized operator-norm estimator ([`inequality`]);
//! - the chain filtration on which `I'_α` fails to be bounded from `L_1` to
//!   `L_p` ([`counterexample`]).
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to use
//! the platform math library instead of `libm`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod counterexample;
pub mod error;
pub mod filtration;
pub mod inequality;
pub mod params;
pub mod report;
pub mod riesz;
pub mod rng;
pub mod single_step;

pub use counterexample::{build_chain, chain_martingale, growth_curve, ChainSpec, GrowthCurve};
pub use error::{Error, Result};
pub use filtration::{Atom, FiltrationTree, MartingaleProcess, RandomVariable, TreeViolation};
pub use inequality::{
    check_numineq, check_split_inequalities, estimate_operator_norm, min_constant, nonsing_gap, reduce_to_nonsingular,
    InequalityInstance, InstanceGenerator, SearchConfig,
};
pub use params::{conjugate_exponent, NormMode, Params, ParamsError};
pub use report::{Report, Violation};
pub use riesz::{conj_riesz, duality_gap, riesz, RieszResult};
pub use single_step::{decompose, SingleStepData};
