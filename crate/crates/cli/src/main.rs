//! `eqdist`: reproducible experiments on square-root gap statistics and the
//! exponential sums behind them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ExpsumArgs, GapsArgs, LimitArgs, Outcome, RateArgs};

#[derive(Debug, Parser)]
#[command(name = "eqdist", version, about = "Gap statistics of sqrt(n) mod 1, their limit laws, and exponential-sum bound sweeps")]
struct Cli {
    /// Worker threads (EQDIST_THREADS takes precedence).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file with default options; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep an exponential-sum bound over a range of moduli.
    Expsum(ExpsumArgs),
    /// Gap distribution of sqrt(n) mod 1 for n <= N.
    Gaps(GapsArgs),
    /// Monte Carlo or horocycle estimates of the limit laws.
    Limit(LimitArgs),
    /// Convergence of lambda_N towards the limit law.
    Rate(RateArgs),
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let (file_threads, file) = config::load(cli.config.as_deref())?;
    let threads = config::resolve_threads(cli.threads, file_threads)?;
    let job = move || match cli.command {
        Command::Expsum(a) => commands::expsum(a.merge(config::command_options(file)?)),
        Command::Gaps(a) => commands::gaps(a.merge(config::command_options(file)?)),
        Command::Limit(a) => commands::limit(a.merge(config::command_options(file)?)),
        Command::Rate(a) => commands::rate(a.merge(config::command_options(file)?)),
    };
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        pool.install(job)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        job()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
