use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fsr_cli::config::parse_regions;
use fsr_cli::experiments::{dickman_json, schedule_json};
use fsr_cli::output::{render_records, summary_path, write_file};
use fsr_cli::{
    run_edit_verify, run_oracle, run_pd_experiment, run_same_cycle, run_toggle_verify, ConfigError, Defaults,
    Experiment, ExperimentConfig, Format, Outcome, Overrides, EXIT_CONFIG, EXIT_VIOLATION,
};

#[derive(Parser)]
#[command(name = "fsrperm", version, about = "Experiments on permutations induced by random feedback shift registers")]
#[command(after_help = "Exit status: 0 success, 2 configuration error, 3 property violation.\n\
    Per-trial records go to --out; the summary JSON goes to stdout and to <out>.summary.json.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Register width
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Number of sampled edges / walks
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Number of toggle regions
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Walk length
    #[arg(long, global = true)]
    t: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Per-trial record file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Replacement thresholds file (same layout as the built-in defaults)
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
    /// Also fail (exit 3) on calibrated Monte Carlo checks
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Scaled cycle lengths against the Poisson-Dirichlet law
    #[command(after_help = "Columns: trial, cycles, a1_over_n, l1_over_n, l2_over_n, d_sorted_vs_pd, d_pd_vs_pd")]
    Pd,
    /// How often k random edges share a cycle, and the law of the relativized permutation
    #[command(after_help = "Columns: trial, cocyclic, distinct, sigma")]
    SameCycle,
    /// Sequential vs shotgun editing on the good event, and cut vs suspended editing
    #[command(after_help = "Columns: trial, g, a, b, c, d, e, f, det_g_ok, gkt, cut_agree")]
    EditVerify,
    /// Toggle classes: happy event, matching claim, single-toggle cycle change
    #[command(
        after_help = "Columns: trial, happy, unhappy_reason, matching_ok, crossjoin_delta, schedule, schedule_distance"
    )]
    ToggleVerify {
        /// Explicit regions `disp:lo:hi,...` instead of the sized defaults
        #[arg(long, value_parser = parse_regions)]
        regions: Option<Vec<(usize, usize, usize)>>,
    },
    /// Exhaustive exact identities at tiny widths
    #[command(after_help = "Columns: report, n, k, t, identity, lhs, rhs, holds")]
    Oracle {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Dickman's function at one point
    Dickman {
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
    },
    /// Exact TV distance from uniform of a schedule's random product, e.g. --k 3 --word 1-2,1-3
    Schedule {
        #[arg(long)]
        word: String,
    },
}

enum Failure {
    Config(ConfigError),
    Io(std::io::Error),
    Violation,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn finish<R: Serialize>(outcome: Outcome<R>, config: &ExperimentConfig, strict: bool) -> Result<(), Failure> {
    let summary = outcome.summary.to_json();
    if let Some(out) = &config.out {
        write_file(out, &render_records(&outcome.records, config.format)?)?;
        write_file(&summary_path(out), summary.as_bytes())?;
    }
    print!("{summary}");
    let bad = outcome.summary.violations(strict);
    for c in &bad {
        eprintln!("check failed: {} = {} (allowed {:?}..{:?})", c.name, c.value, c.lo, c.hi);
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let defaults = match &cli.thresholds {
        Some(p) => Defaults::load(p)?,
        None => Defaults::builtin(),
    };
    let mut overrides = Overrides {
        n: cli.n,
        k: cli.k,
        m: cli.m,
        t: cli.t,
        trials: cli.trials,
        seed: cli.seed,
        out: cli.out,
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        jobs: cli.jobs,
        regions: None,
    };
    let strict = cli.strict;
    match cli.command {
        Command::Pd => {
            let c = ExperimentConfig::resolve(Experiment::Pd, overrides, &defaults)?;
            finish(run_pd_experiment(&c, &defaults)?, &c, strict)
        }
        Command::SameCycle => {
            let c = ExperimentConfig::resolve(Experiment::SameCycle, overrides, &defaults)?;
            finish(run_same_cycle(&c, &defaults)?, &c, strict)
        }
        Command::EditVerify => {
            let c = ExperimentConfig::resolve(Experiment::EditVerify, overrides, &defaults)?;
            finish(run_edit_verify(&c, &defaults)?, &c, strict)
        }
        Command::ToggleVerify { regions } => {
            overrides.regions = regions;
            let c = ExperimentConfig::resolve(Experiment::ToggleVerify, overrides, &defaults)?;
            finish(run_toggle_verify(&c, &defaults)?, &c, strict)
        }
        Command::Oracle { inject_fault } => {
            let c = ExperimentConfig::resolve(Experiment::Oracle, overrides, &defaults)?;
            finish(run_oracle(&c, &defaults, inject_fault)?, &c, strict)
        }
        Command::Dickman { u } => {
            println!("{}", dickman_json(u)?);
            Ok(())
        }
        Command::Schedule { word } => {
            let k = overrides.k.ok_or_else(|| ConfigError::Invalid("schedule needs --k".into()))?;
            println!("{}", schedule_json(k, &word)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(Failure::Violation) => ExitCode::from(EXIT_VIOLATION as u8),
    }
}
