use std::path::PathBuf;

use mrz_core::counterexample::{growth_curve, ChainSpec, GrowthCurve};
use serde::Serialize;

use super::{to_value, Outcome};
use crate::error::{CliResult, Status};
use crate::io::read_chain;
use crate::output::{csv_bytes, json_string};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleOptions {
    pub p: f64,
    pub n_max: usize,
    /// Chain probabilities; dyadic when absent.
    pub chain: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    #[serde(rename = "N")]
    pub depth: usize,
    pub norm_p_to_the_p: f64,
    pub closed_form_value: f64,
    #[serde(rename = "K_threshold")]
    pub threshold: Option<usize>,
}

pub const CURVE_HEADER: [&str; 4] = ["N", "norm_p_to_the_p", "closed_form_value", "K_threshold"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub p: f64,
    pub alpha: f64,
    pub n_max: usize,
    pub threshold: Option<usize>,
    /// Least-squares slope of the curve over `[fit_from, n_max]`.
    pub slope: Option<f64>,
    pub fit_from: usize,
    pub final_value: f64,
    pub worst_agreement: f64,
}

/// The slope is fitted over the last two thirds of the curve.
pub fn fit_start(n_max: usize) -> usize {
    n_max / 3
}

pub fn run_counterexample(opts: &CounterexampleOptions) -> CliResult<GrowthCurve> {
    let spec = match &opts.chain {
        Some(path) => read_chain(path)?.truncate(opts.n_max),
        None => ChainSpec::dyadic(opts.n_max)?,
    };
    Ok(growth_curve(&spec, opts.p)?)
}

pub fn cmd_counterexample(opts: &CounterexampleOptions) -> CliResult<Outcome> {
    let curve = run_counterexample(opts)?;
    let rows: Vec<CurveRow> = curve
        .points
        .iter()
        .map(|pt| CurveRow {
            depth: pt.depth,
            norm_p_to_the_p: pt.norm_pow,
            closed_form_value: pt.closed_form_norm_pow,
            threshold: curve.threshold,
        })
        .collect();
    let n_max = curve.points.len() - 1;
    let summary = to_value(&CurveSummary {
        p: curve.p,
        alpha: curve.alpha,
        n_max,
        threshold: curve.threshold,
        slope: curve.slope(fit_start(n_max), n_max),
        fit_from: fit_start(n_max),
        final_value: curve.points[n_max].norm_pow,
        worst_agreement: curve.points.iter().fold(0.0, |m, pt| m.max(pt.agreement)),
    });
    Ok(Outcome {
        status: Status::Pass,
        files: vec![
            ("counterexample.csv".into(), csv_bytes(&CURVE_HEADER, &rows)?),
            ("summary.json".into(), json_string(&summary).into_bytes()),
        ],
        summary,
        seed: None,
        params: to_value(opts),
        inputs: opts.chain.iter().cloned().collect(),
    })
}
