//! Outcome of checking an inequality coordinate by coordinate.

use alloc::vec::Vec;

/// Tolerance under which a negative slack still counts as satisfied,
/// relative to the scale of the compared quantities.
pub const SLACK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Violation {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// `lhs_j ≤ rhs_j` checked for every `j`. `worst_slack` is the smallest
/// `rhs_j − lhs_j` (infinite when there is nothing to check).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Report {
    pub condition: &'static str,
    pub worst_slack: f64,
    pub violations: Vec<Violation>,
}

impl Report {
    /// Builds the report from `(lhs_j, rhs_j)` pairs; `scale` sets the
    /// absolute size of the rounding allowance.
    pub fn from_pairs(condition: &'static str, pairs: impl IntoIterator<Item = (f64, f64)>, scale: f64) -> Self {
        let allowance = SLACK_TOLERANCE * scale.abs();
        let mut worst_slack = f64::INFINITY;
        let mut violations = Vec::new();
        for (index, (lhs, rhs)) in pairs.into_iter().enumerate() {
            let slack = rhs - lhs;
            worst_slack = worst_slack.min(slack);
            if !(slack >= -allowance) {
                violations.push(Violation { index, lhs, rhs });
            }
        }
        Self {
            condition,
            worst_slack,
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}
