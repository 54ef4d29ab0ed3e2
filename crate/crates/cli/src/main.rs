mod args;
mod commands;
mod input;
mod output;
mod reproduce;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command};

/// Outcome of a successful run: 0 when the answer is positive, 2 when negative.
pub enum Status {
    Pass,
    Negative,
}

fn set_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Status> {
    match &cli.command {
        Command::Spectrum(a) => {
            set_jobs(a.output.jobs)?;
            commands::spectrum_cmd(a)
        }
        Command::ScanReality(a) => commands::scan_reality_cmd(a),
        Command::ScanPd(a) => {
            set_jobs(a.output.jobs)?;
            commands::scan_pd_cmd(a)
        }
        Command::Metric(a) => {
            set_jobs(a.output.jobs)?;
            commands::metric_cmd(a)
        }
        Command::Verify(a) => {
            set_jobs(a.output.jobs)?;
            commands::verify_cmd(a)
        }
        Command::Reproduce(a) => {
            set_jobs(a.output.jobs)?;
            reproduce::reproduce_cmd(a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit with 2, which is reserved for negative answers
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
