use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use icp::commands::{cmd_fit, cmd_run, cmd_solve, RunOptions, EXIT_INPUT};
use icp_core::cp::DEFAULT_BUDGET;

/// Finite-domain solving, regression fitting and learn/solve loop scenarios.
///
/// Exit codes: 0 success, 1 unsatisfiable (or a scenario stopped on a failed
/// cycle), 2 search budget exhausted, 3 invalid input.
#[derive(Parser)]
#[command(name = "icp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, or minimize, a constraint network in the text instance format.
    Solve {
        instance: PathBuf,
        /// Maximum number of branch decisions.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Fit a linear model to a CSV dataset (`f1,...,fM,target`).
    Fit {
        csv: PathBuf,
        /// Ridge penalty; without it a tiny one is used only if the plain
        /// system is singular.
        #[arg(long)]
        ridge: Option<f64>,
    },
    /// Run a scenario config and write per-cycle metrics as JSON lines.
    Run {
        config: PathBuf,
        #[arg(long)]
        cycles: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Metrics file, `metrics.jsonl` by default.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every repository record to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Solve { instance, budget } => cmd_solve(&instance, budget, &mut out, &mut err),
        Command::Fit { csv, ridge } => cmd_fit(&csv, ridge, &mut out, &mut err),
        Command::Run { config, cycles, seed, out: metrics, log } => {
            let opts = RunOptions { cycles, seed, out: metrics, log };
            cmd_run(&config, &opts, &mut out, &mut err)
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
