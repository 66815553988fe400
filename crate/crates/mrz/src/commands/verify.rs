//! Runs every identity and condition check on one tree and variable.

use std::path::PathBuf;
use std::sync::Arc;

use mrz_core::filtration::relative_sup_error;
use mrz_core::{conj_riesz, conjugate_exponent, decompose, duality_gap, MartingaleProcess, RandomVariable};
use serde::Serialize;

use super::{to_value, Outcome};
use crate::error::{CliError, CliResult, Status};
use crate::io::{read_tree, read_variable, TreeDoc, VariableDoc};
use crate::output::json_string;

/// Public tolerance on exact identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Tolerance on duality and on the conditional-subtree identity.
pub const DUALITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub tree: PathBuf,
    pub var: PathBuf,
    pub p: f64,
    pub alpha: Option<f64>,
    /// Constant for `∫_{a_j} |B|^p ≤ C y_j^p`; skipped when absent.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Error measure, or negative worst slack for inequality conditions.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn error(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn condition(name: &'static str, report: &mrz_core::Report) -> Self {
        Self {
            name,
            value: -report.worst_slack,
            tolerance: 0.0,
            passed: report.passed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub tree: TreeDoc,
    pub variable: VariableDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub p: f64,
    pub alpha: f64,
    pub checks: Vec<Check>,
    /// The offending input, present only when a check fails.
    pub instance: Option<Instance>,
}

fn lifted_distance(a: &RandomVariable, b: &RandomVariable) -> f64 {
    let level = a.level().max(b.level());
    match (a.lift(level), b.lift(level)) {
        (Ok(a), Ok(b)) => relative_sup_error(a.values(), b.values()),
        _ => f64::INFINITY,
    }
}

pub fn verify(f: &RandomVariable, p: f64, alpha: f64, c: Option<f64>) -> CliResult<VerifyReport> {
    let depth = f.tree().depth();
    let f = f.condition(depth)?;
    let process = MartingaleProcess::from_terminal(&f);
    let g = process.maximal_function();
    let scale = f.lp_norm(2.0)? * g.lp_norm(2.0)?;
    let mut checks = vec![Check::error(
        "martingale-tower",
        process.worst_tower_error().map_or(0.0, |e| e.1),
        IDENTITY_TOLERANCE,
    )];

    let (mut tower, mut adjoint, mut commute, mut duality) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for n in 0..=depth {
        for k in 0..=depth {
            let twice = f.condition(k)?.condition(n)?;
            tower = tower.max(lifted_distance(&twice, &f.condition(k.min(n))?));
        }
        for k in 0..=n {
            let left = f.multiply(k, alpha)?.condition(n)?;
            commute = commute.max(lifted_distance(&left, &f.condition(n)?.multiply(k, alpha)?));
        }
        let e = f.condition(n)?.inner(&g)? - f.inner(&g.condition(n)?)?;
        let m = f.multiply(n, alpha)?.inner(&g)? - f.inner(&g.multiply(n, alpha)?)?;
        adjoint = adjoint.max(e.abs().max(m.abs()) / scale.max(f64::MIN_POSITIVE));
        duality = duality.max(duality_gap(&f, &g, alpha, n)? / scale.max(f64::MIN_POSITIVE));
    }
    let full = conj_riesz(&f, alpha, depth)?;
    let truncation = (0..=depth).try_fold(0.0_f64, |m, n| {
        Ok::<_, CliError>(m.max(lifted_distance(&full.value.condition(n)?, &full.partials[n])))
    })?;
    checks.extend([
        Check::error("conditioning-tower", tower, IDENTITY_TOLERANCE),
        Check::error("self-adjointness", adjoint, IDENTITY_TOLERANCE),
        Check::error("commutation", commute, IDENTITY_TOLERANCE),
        Check::error("truncation", truncation, IDENTITY_TOLERANCE),
        Check::error("duality", duality, DUALITY_TOLERANCE),
    ]);

    if depth >= 1 {
        let d = decompose(&f, p)?;
        let tail = d.check_b_bound(c.unwrap_or(1.0))?;
        let a_norm = (d.a.lp_norm_pow(p)? - d.a_norm_pow()).abs() / d.a_norm_pow().max(f64::MIN_POSITIVE);
        checks.extend([
            Check::error("probabilities-sum-to-one", d.probability_defect(), IDENTITY_TOLERANCE),
            Check::condition("y-dominates-x", &d.check_domination()),
            Check::condition("non-singularity", &d.check_nonsingularity()),
            Check::condition("A-bound", &d.check_a_bound()),
            Check::error("A-norm", a_norm, IDENTITY_TOLERANCE),
            Check::error("recombination", d.recombination_error(), IDENTITY_TOLERANCE),
            Check::error("tail-subtree-identity", tail.identity_error, DUALITY_TOLERANCE),
        ]);
        if c.is_some() {
            checks.push(Check::condition("B-bound", &tail.bound));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        passed,
        p,
        alpha,
        checks,
        instance: (!passed).then(|| Instance {
            tree: TreeDoc::from_tree(f.tree()),
            variable: VariableDoc {
                level: f.level(),
                values: f.values().to_vec(),
            },
        }),
    })
}

pub fn cmd_verify(opts: &VerifyOptions) -> CliResult<Outcome> {
    if !(opts.p > 1.0 && opts.p.is_finite()) {
        return Err(CliError::Usage(format!("p must satisfy 1 < p < ∞ (got {})", opts.p)));
    }
    let alpha = opts.alpha.unwrap_or(1.0 / conjugate_exponent(opts.p));
    if !(0.0..1.0).contains(&alpha) {
        return Err(CliError::Usage(format!("alpha must lie in [0, 1) (got {alpha})")));
    }
    let tree = Arc::new(read_tree(&opts.tree)?);
    let f = read_variable(&opts.var, tree)?;
    let report = verify(&f, opts.p, alpha, opts.c)?;
    let summary = to_value(&report);
    Ok(Outcome {
        status: if report.passed { Status::Pass } else { Status::Fail },
        files: vec![("report.json".into(), json_string(&summary).into_bytes())],
        summary,
        seed: None,
        params: to_value(opts),
        inputs: vec![opts.tree.clone(), opts.var.clone()],
    })
}
