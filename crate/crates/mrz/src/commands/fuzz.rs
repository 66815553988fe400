//! Randomized checks of the four-sequence inequality, the non-singularity
//! lemma and the single-step conditions.

use std::sync::Arc;

use clap::ValueEnum;
use mrz_core::inequality::{nonsing_gap, InstanceGenerator, NumIneqSums};
use mrz_core::{decompose, rng, FiltrationTree, RandomVariable};
use rand::Rng;
use serde::Serialize;

use super::{to_value, Outcome};
use crate::error::{CliError, CliResult, Status};
use crate::output::{csv_bytes, json_string, Stats};
use crate::parallel::ordered_map;

/// Factor on the reported constant at which every instance is re-checked.
pub const CHECK_FACTOR: f64 = 1.01;
/// Tolerance on the conditional-subtree identity for the tail.
pub const TAIL_IDENTITY_TOLERANCE: f64 = 1e-10;
/// Violations listed individually in the summary.
const LISTED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FuzzKind {
    Numineq,
    Nonsing,
    Conditions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzOptions {
    pub kind: FuzzKind,
    pub p: f64,
    pub mu: f64,
    pub trials: u64,
    pub seed: u64,
    /// Tree bounds for `conditions`.
    pub depth: usize,
    pub branch_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzRow {
    pub seed: u64,
    pub index: u64,
    pub s: usize,
    pub p: f64,
    pub mu: f64,
    /// Minimal constant, `rhs/lhs` ratio, or worst condition slack.
    pub value: f64,
}

pub const FUZZ_HEADER: [&str; 6] = ["seed", "index", "s", "p", "mu", "value"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub kind: FuzzKind,
    pub status: &'static str,
    pub trials: u64,
    pub seed: u64,
    pub p: f64,
    pub mu: f64,
    pub stats: Option<Stats>,
    /// Supremum of per-instance minimal constants (`numineq` only).
    pub constant: Option<f64>,
    pub violation_count: usize,
    pub violations: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub rows: Vec<FuzzRow>,
    pub summary: FuzzSummary,
}

struct Trial {
    s: usize,
    value: f64,
    ok: bool,
    sums: Option<NumIneqSums>,
}

fn numineq_trial(generator: &InstanceGenerator, seed: u64, index: u64) -> Trial {
    let inst = generator.instance(seed, index);
    let sums = NumIneqSums::new(&inst);
    let minimal = sums.minimal_constant();
    Trial {
        s: inst.atoms(),
        value: minimal.unwrap_or(f64::INFINITY),
        ok: inst.validate().is_ok() && minimal.is_some(),
        sums: Some(sums),
    }
}

fn nonsing_trial(generator: &InstanceGenerator, seed: u64, index: u64) -> Trial {
    let inst = generator.instance(seed, index);
    match nonsing_gap(&inst.x, &inst.probs, inst.p) {
        Ok(gap) => Trial {
            s: inst.atoms(),
            value: gap.implied_constant(),
            ok: gap.lhs >= 0.0 && gap.implied_constant().is_finite(),
            sums: None,
        },
        Err(_) => Trial {
            s: inst.atoms(),
            value: f64::NAN,
            ok: false,
            sums: None,
        },
    }
}

/// A random tree and variable for the single-step checks.
pub fn random_martingale(seed: u64, index: u64, depth: usize, branch_max: usize) -> RandomVariable {
    let mut rng = rng::stream(seed, index);
    let depth = rng.random_range(1..=depth);
    let tree = Arc::new(FiltrationTree::random(&mut rng, depth, branch_max));
    let values = (0..tree.leaf_count()).map(|_| rng::normal(&mut rng)).collect();
    RandomVariable::new(tree, depth, values).expect("leaf values match the leaf count")
}

fn conditions_trial(opts: &FuzzOptions, index: u64) -> Trial {
    let f = random_martingale(opts.seed, index, opts.depth, opts.branch_max);
    let Ok(d) = decompose(&f, opts.p) else {
        return Trial {
            s: 0,
            value: f64::NAN,
            ok: false,
            sums: None,
        };
    };
    let nonsingular = d.check_nonsingularity();
    let capped = d.check_a_bound();
    let tail = d.check_b_bound(1.0).map(|r| r.identity_error).unwrap_or(f64::INFINITY);
    let ok = nonsingular.passed()
        && capped.passed()
        && d.check_domination().passed()
        && d.probability_defect() <= 1e-9
        && tail <= TAIL_IDENTITY_TOLERANCE;
    Trial {
        s: d.atoms(),
        value: nonsingular.worst_slack.min(capped.worst_slack),
        ok,
        sums: None,
    }
}

pub fn run_fuzz(opts: &FuzzOptions) -> CliResult<FuzzReport> {
    let generator = InstanceGenerator::new(opts.p, opts.mu);
    if !(opts.p > 1.0 && opts.p.is_finite()) {
        return Err(CliError::Usage(format!("p must satisfy 1 < p < ∞ (got {})", opts.p)));
    }
    if !(opts.mu > 0.0 && opts.mu.is_finite()) {
        return Err(CliError::Usage(format!("mu must be positive (got {})", opts.mu)));
    }
    if opts.depth == 0 || opts.branch_max == 0 {
        return Err(CliError::Usage("depth and branch-max must be positive".into()));
    }
    let trials = ordered_map(opts.trials, |i| match opts.kind {
        FuzzKind::Numineq => numineq_trial(&generator, opts.seed, i),
        FuzzKind::Nonsing => nonsing_trial(&generator, opts.seed, i),
        FuzzKind::Conditions => conditions_trial(opts, i),
    });

    let mut failed: Vec<u64> = trials.iter().enumerate().filter(|(_, t)| !t.ok).map(|(i, _)| i as u64).collect();
    let constant = (opts.kind == FuzzKind::Numineq && !trials.is_empty()).then(|| {
        trials.iter().map(|t| t.value).filter(|v| v.is_finite()).fold(0.0, f64::max)
    });
    if let Some(c) = constant {
        let check = c * CHECK_FACTOR;
        failed.extend(
            trials
                .iter()
                .enumerate()
                .filter(|(_, t)| t.ok && !t.sums.as_ref().is_some_and(|s| s.evaluate(check).holds))
                .map(|(i, _)| i as u64),
        );
        failed.sort_unstable();
    }

    let values: Vec<f64> = trials.iter().map(|t| t.value).collect();
    let rows = trials
        .iter()
        .enumerate()
        .map(|(i, t)| FuzzRow {
            seed: opts.seed,
            index: i as u64,
            s: t.s,
            p: opts.p,
            mu: opts.mu,
            value: t.value,
        })
        .collect();
    let status = if trials.is_empty() {
        "no data"
    } else if failed.is_empty() {
        "pass"
    } else {
        "fail"
    };
    Ok(FuzzReport {
        rows,
        summary: FuzzSummary {
            kind: opts.kind,
            status,
            trials: opts.trials,
            seed: opts.seed,
            p: opts.p,
            mu: opts.mu,
            stats: Stats::of(&values),
            constant,
            violation_count: failed.len(),
            violations: failed.into_iter().take(LISTED_VIOLATIONS).collect(),
        },
    })
}

pub fn cmd_fuzz(opts: &FuzzOptions) -> CliResult<Outcome> {
    let report = run_fuzz(opts)?;
    let status = if report.summary.violation_count == 0 {
        Status::Pass
    } else {
        Status::Fail
    };
    let summary = to_value(&report.summary);
    Ok(Outcome {
        status,
        files: vec![
            ("fuzz.csv".into(), csv_bytes(&FUZZ_HEADER, &report.rows)?),
            ("summary.json".into(), json_string(&summary).into_bytes()),
        ],
        summary,
        seed: Some(opts.seed),
        params: to_value(opts),
        inputs: Vec::new(),
    })
}
