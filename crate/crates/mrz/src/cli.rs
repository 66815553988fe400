use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mrz_core::inequality::SearchConfig;

use crate::commands::counterexample::{cmd_counterexample, CounterexampleOptions};
use crate::commands::fuzz::{cmd_fuzz, FuzzKind, FuzzOptions};
use crate::commands::norms::{cmd_norms, CorpusArg, ModeArg, NormalizationArg, NormsOptions};
use crate::commands::verify::{cmd_verify, VerifyOptions};
use crate::commands::Outcome;
use crate::error::{CliError, CliResult, Status};
use crate::output::{json_string, OutDir, RunManifest, ARTIFACT_VERSION};
use crate::parallel::with_pool;

#[derive(Debug, Parser)]
#[command(name = "mrz", version, about = "Riesz potentials and their inequalities on finite filtration trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Directory for CSV tables, summaries and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every identity and condition on a tree and a variable.
    Verify {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        var: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Defaults to 1/p'.
        #[arg(long)]
        alpha: Option<f64>,
        /// Constant for the tail bound.
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Randomized checks with one CSV row per trial.
    Fuzz {
        #[arg(long, value_enum)]
        kind: FuzzKind,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        branch_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Lower bounds on operator norms by randomized hill climbing.
    Norms {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Native)]
        normalization: NormalizationArg,
        #[arg(long, value_enum, default_value_t = CorpusArg::Random)]
        corpus: CorpusArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 20)]
        restarts: u64,
        #[arg(long, default_value_t = 0.5)]
        perturbation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        branch_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Growth of the conjugate potential along a chain of shrinking atoms.
    Counterexample {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 60)]
        n_max: usize,
        /// JSON file {"d": [1.0, ...]}; dyadic when absent.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Repeat a run from its manifest.
    Rerun {
        manifest: PathBuf,
        /// Write to this directory instead of the recorded one.
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Fuzz { .. } => "fuzz",
            Command::Norms { .. } => "norms",
            Command::Counterexample { .. } => "counterexample",
            Command::Rerun { .. } => "rerun",
        }
    }

    fn out_dir(&self) -> OutDir {
        match self {
            Command::Verify { output, .. }
            | Command::Fuzz { output, .. }
            | Command::Norms { output, .. }
            | Command::Counterexample { output, .. }
            | Command::Rerun { output, .. } => OutDir(output.out.clone()),
        }
    }
}

fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Verify {
            tree,
            var,
            p,
            alpha,
            c,
            ..
        } => cmd_verify(&VerifyOptions {
            tree: tree.clone(),
            var: var.clone(),
            p: *p,
            alpha: *alpha,
            c: *c,
        }),
        Command::Fuzz {
            kind,
            p,
            mu,
            trials,
            seed,
            depth,
            branch_max,
            ..
        } => cmd_fuzz(&FuzzOptions {
            kind: *kind,
            p: *p,
            mu: *mu,
            trials: *trials,
            seed: *seed,
            depth: *depth,
            branch_max: *branch_max,
        }),
        Command::Norms {
            mode,
            p,
            q,
            r,
            alpha,
            normalization,
            corpus,
            trials,
            restarts,
            perturbation,
            seed,
            depth,
            branch_max,
            ..
        } => cmd_norms(&NormsOptions {
            mode: *mode,
            p: *p,
            q: *q,
            r: *r,
            alpha: *alpha,
            normalization: *normalization,
            corpus: *corpus,
            config: SearchConfig {
                seed: *seed,
                trials: *trials,
                restarts: *restarts,
                perturbation: *perturbation,
                depth: *depth,
                branch_max: *branch_max,
            },
        }),
        Command::Counterexample { p, n_max, chain, .. } => cmd_counterexample(&CounterexampleOptions {
            p: *p,
            n_max: *n_max,
            chain: chain.clone(),
        }),
        Command::Rerun { .. } => unreachable!("reruns are resolved before dispatch"),
    }
}

/// Replaces any `--out` in recorded arguments with `out`.
fn redirect(args: &[String], out: &std::path::Path) -> Vec<String> {
    let mut kept = Vec::with_capacity(args.len() + 2);
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--out" {
            iter.next();
        } else if !arg.starts_with("--out=") {
            kept.push(arg.clone());
        }
    }
    kept.push("--out".into());
    kept.push(out.display().to_string());
    kept
}

/// Runs a parsed command, writes its files and manifest, prints the summary.
pub fn execute(cli: Cli, args: Vec<String>) -> CliResult<Status> {
    if let Command::Rerun { manifest, output } = &cli.command {
        let recorded = RunManifest::read(manifest)?;
        let args = match &output.out {
            Some(out) => redirect(&recorded.args, out),
            None => recorded.args,
        };
        let cli = Cli::try_parse_from(std::iter::once("mrz".to_string()).chain(args.iter().cloned()))
            .map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
        if matches!(cli.command, Command::Rerun { .. }) {
            return Err(CliError::Usage("a manifest cannot record a rerun".into()));
        }
        return execute(cli, args);
    }

    let started = Instant::now();
    let outcome = with_pool(|| dispatch(&cli.command))?;
    let out = cli.command.out_dir();
    let mut outputs = Vec::new();
    for (name, bytes) in &outcome.files {
        outputs.extend(out.write(name, bytes)?);
    }
    let manifest = RunManifest {
        command: cli.command.name().into(),
        args,
        seed: outcome.seed,
        params: outcome.params.clone(),
        inputs: outcome.inputs.clone(),
        outputs,
        artifact_version: ARTIFACT_VERSION.into(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    out.write("manifest.json", json_string(&manifest).as_bytes())?;
    print!("{}", json_string(&outcome.summary));
    Ok(outcome.status)
}

/// Parses `argv` (program name first) and runs it; returns the process exit code.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, args) {
        Ok(status) => status.into(),
        Err(err) => {
            eprintln!("mrz: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
