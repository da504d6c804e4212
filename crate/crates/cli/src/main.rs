use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nonlocal_cli::{run, Command, RunOptions};

/// Spherical and radial nonlocal operators: reproducible experiments with CSV output.
#[derive(Debug, Parser)]
#[command(name = "nonlocal", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML experiment config; defaults apply to missing sections and keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the CSV.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads for sweeps (output does not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for random test fields.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = RunOptions {
        command: args.command,
        config: args.config,
        out: args.out,
        threads: args.threads,
        seed: args.seed,
    };
    match run(&opts) {
        Ok(outcome) => {
            println!("{}", outcome.report.verdict_line());
            ExitCode::from(if outcome.report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
