//! Experiment runner behind the `nonlocal` binary: each subcommand reads an
//! [`ExperimentConfig`], writes one CSV into the output directory and
//! returns a verdict.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::{Path, PathBuf};

use clap::ValueEnum;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Localize,
    Multiplier,
    KernelCheck,
    Witness,
    CounterexampleLinf,
    GaussGreen,
    Area,
    AtomicDemo,
    Bench,
    Bessel,
    Zeros,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub csv_path: PathBuf,
}

pub fn execute(command: Command, cfg: &ExperimentConfig, seed: u64) -> Result<Report, CliError> {
    use commands::*;
    match command {
        Command::Localize => localize(cfg, seed),
        Command::Multiplier => multiplier(cfg),
        Command::KernelCheck => kernel_check(cfg),
        Command::Witness => witness(cfg),
        Command::CounterexampleLinf => counterexample_linf(cfg),
        Command::GaussGreen => gauss_green(cfg, seed),
        Command::Area => area(cfg),
        Command::AtomicDemo => atomic_demo(cfg),
        Command::Bench => bench(cfg, seed),
        Command::Bessel => bessel(cfg),
        Command::Zeros => zeros(cfg),
    }
}

pub fn run(opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let cfg = match &opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::from_toml("", Path::new("."))?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = opts.threads {
        if k == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| execute(opts.command, &cfg, opts.seed))?;
    std::fs::create_dir_all(&opts.out).map_err(|source| CliError::Io {
        path: opts.out.clone(),
        source,
    })?;
    let csv_path = opts.out.join(report.file_name());
    std::fs::write(&csv_path, report.to_csv(&cfg.echo(), opts.seed)).map_err(|source| CliError::Io {
        path: csv_path.clone(),
        source,
    })?;
    Ok(RunOutcome { report, csv_path })
}
