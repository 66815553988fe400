//! Finite filtrations as trees of atoms, random variables on them, and the
//! operators `E_n`, `M_n` together with the `L_p`, `H_1` and BMO norms.

mod martingale;
mod tree;
mod variable;

pub(crate) mod variable_ops {
    pub(crate) use super::variable::{average_values, lift_values};
}

pub use martingale::MartingaleProcess;
pub use tree::{Atom, FiltrationTree, Subtree, TreeViolation, PROBABILITY_TOLERANCE};
pub use variable::RandomVariable;

/// `max |a_i − b_i| / max |b_i|`, or the absolute distance when `b` vanishes.
pub fn relative_sup_error(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
