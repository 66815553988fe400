use clap::ValueEnum;
use mrz_core::inequality::{NormEstimate, NormSearch, Normalization, SearchConfig, TreeCorpus};
use mrz_core::{NormMode, Params};
use serde::Serialize;

use super::{to_value, Outcome};
use crate::error::{CliError, CliResult, Status};
use crate::output::{csv_bytes, json_string};
use crate::parallel::ordered_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Hls,
    Bmo,
    Conjugate,
}

impl From<ModeArg> for NormMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Hls => NormMode::Hls,
            ModeArg::Bmo => NormMode::Bmo,
            ModeArg::Conjugate => NormMode::Conjugate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationArg {
    Native,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusArg {
    Random,
    Chain,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormsOptions {
    pub mode: ModeArg,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub normalization: NormalizationArg,
    pub corpus: CorpusArg,
    pub config: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub restart: u64,
    pub depth: usize,
    pub leaves: usize,
    pub evaluations: u64,
    pub best: f64,
    pub running_max: f64,
}

pub const TRACE_HEADER: [&str; 6] = ["restart", "depth", "leaves", "evaluations", "best", "running_max"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormsSummary {
    pub mode: ModeArg,
    pub alpha: f64,
    pub normalization: NormalizationArg,
    pub corpus: CorpusArg,
    pub estimate: f64,
    pub best_restart: Option<u64>,
    pub trials: u64,
    pub seed: u64,
}

pub fn search_for(opts: &NormsOptions) -> CliResult<NormSearch> {
    let mode = NormMode::from(opts.mode);
    let mut params = Params::for_mode(mode, opts.p, opts.q, opts.r)?;
    if let Some(alpha) = opts.alpha {
        params = params.with_alpha(mode, alpha)?;
    }
    let search = NormSearch::new(mode, params)?
        .with_normalization(match opts.normalization {
            NormalizationArg::Native => Normalization::Native,
            NormalizationArg::L1 => Normalization::L1,
        })
        .with_corpus(match opts.corpus {
            CorpusArg::Random => TreeCorpus::Random,
            CorpusArg::Chain => TreeCorpus::Chain,
            CorpusArg::Mixed => TreeCorpus::Mixed,
        });
    Ok(search)
}

/// Restarts run in parallel and are reduced in index order.
pub fn run_norms(opts: &NormsOptions) -> CliResult<NormEstimate> {
    let search = search_for(opts)?;
    let cfg = opts.config;
    cfg.validate()?;
    let restarts = ordered_map(cfg.restarts, |r| search.run_restart(&cfg, r))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from)?;
    Ok(NormEstimate::combine(restarts))
}

pub fn cmd_norms(opts: &NormsOptions) -> CliResult<Outcome> {
    let search = search_for(opts)?;
    let estimate = run_norms(opts)?;
    let mut running = 0.0_f64;
    let rows: Vec<TraceRow> = estimate
        .restarts
        .iter()
        .map(|r| {
            running = running.max(r.best);
            TraceRow {
                restart: r.restart,
                depth: r.depth,
                leaves: r.leaves,
                evaluations: r.evaluations,
                best: r.best,
                running_max: running,
            }
        })
        .collect();
    let summary = to_value(&NormsSummary {
        mode: opts.mode,
        alpha: search.params.alpha,
        normalization: opts.normalization,
        corpus: opts.corpus,
        estimate: estimate.estimate,
        best_restart: estimate.best_restart,
        trials: opts.config.trials,
        seed: opts.config.seed,
    });
    Ok(Outcome {
        status: Status::Pass,
        files: vec![
            ("norms.csv".into(), csv_bytes(&TRACE_HEADER, &rows)?),
            ("summary.json".into(), json_string(&summary).into_bytes()),
        ],
        summary,
        seed: Some(opts.config.seed),
        params: to_value(opts),
        inputs: Vec::new(),
    })
}
