//! The three commands, writing to caller-supplied streams and returning the
//! process exit code.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use icp_core::cp::{ConstraintNetwork, SolveOutcome, Solver};
use icp_core::ml::{fit_linear, fit_linear_default, loss};

use crate::config::ScenarioConfig;
use crate::dataset::parse_dataset;
use crate::instance::parse_instance;
use crate::log::LogRecord;
use crate::metrics::write_metrics;
use crate::scenario::{run_scenario, RunError, Summary};

/// Success, or a solution was found.
pub const EXIT_OK: i32 = 0;
/// The instance is unsatisfiable, or a scenario stopped on a failed cycle.
pub const EXIT_UNSAT: i32 = 1;
/// The search budget ran out.
pub const EXIT_BUDGET: i32 = 2;
/// Unreadable or invalid input.
pub const EXIT_INPUT: i32 = 3;

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            None
        }
    }
}

fn print_assignment(network: &ConstraintNetwork, values: &[i64], out: &mut dyn Write) -> io::Result<()> {
    for (v, value) in network.vars().zip(values) {
        writeln!(out, "{}={value}", network.name(v))?;
    }
    Ok(())
}

/// Solves an instance file; minimizes when it names an objective.
pub fn cmd_solve(path: &Path, budget: u64, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let Some(text) = read(path, err) else { return Ok(EXIT_INPUT) };
    let network = match parse_instance(&text) {
        Ok(n) => n,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
    };
    let solver = Solver::new(budget);
    let result = if network.objective().is_some() { solver.minimize(&network) } else { solver.solve(&network) };
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
    };
    match result.outcome {
        SolveOutcome::Solution { assignment, objective } => {
            print_assignment(&network, assignment.values(), out)?;
            if let Some(v) = objective {
                writeln!(out, "objective={v}")?;
            }
            Ok(EXIT_OK)
        }
        SolveOutcome::Unsat => {
            writeln!(out, "UNSAT")?;
            Ok(EXIT_UNSAT)
        }
        SolveOutcome::BudgetExceeded { nodes, incumbent } => {
            writeln!(out, "BUDGET")?;
            writeln!(err, "budget of {nodes} nodes exhausted")?;
            if let Some((assignment, v)) = incumbent {
                print_assignment(&network, assignment.values(), out)?;
                writeln!(out, "objective={v}")?;
            }
            Ok(EXIT_BUDGET)
        }
    }
}

/// Fits a linear model to a CSV dataset and prints `w1..wM`, the intercept
/// and the training loss.
pub fn cmd_fit(path: &Path, ridge: Option<f64>, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let Some(text) = read(path, err) else { return Ok(EXIT_INPUT) };
    let data = match parse_dataset(&text) {
        Ok(d) => d,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
    };
    let fitted = match ridge {
        Some(r) => fit_linear(&data, r),
        None => fit_linear_default(&data),
    };
    let h = match fitted {
        Ok(h) => h,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_INPUT);
        }
    };
    for (i, w) in h.weights[..h.features()].iter().enumerate() {
        writeln!(out, "w{}={w}", i + 1)?;
    }
    writeln!(out, "intercept={}", h.intercept())?;
    // the dataset was validated above, so the loss is defined
    writeln!(out, "loss={}", loss(&data, &h).unwrap_or(f64::NAN))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub cycles: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<std::path::PathBuf>,
    pub log: Option<std::path::PathBuf>,
}

/// Default metrics path when `--out` is not given.
pub const DEFAULT_METRICS: &str = "metrics.jsonl";

fn write_file(path: &Path, write: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    write(&mut f)
}

fn write_log_file(path: &Path, log: &[LogRecord]) -> io::Result<()> {
    write_file(path, |f| {
        for r in log {
            serde_json::to_writer(&mut *f, r)?;
            f.write_all(b"\n")?;
        }
        f.flush()
    })
}

/// Runs a scenario config, writes its metrics and prints a summary.
pub fn cmd_run(path: &Path, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let started = Instant::now();
    let Some(text) = read(path, err) else { return Ok(EXIT_INPUT) };
    let mut config = match ScenarioConfig::from_toml(&text) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
    };
    if let Some(c) = opts.cycles {
        config.cycles = c;
    }
    if let Some(s) = opts.seed {
        config.seed = s;
    }
    let run = match run_scenario(&config) {
        Ok(r) => r,
        Err(RunError::Config(e)) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_UNSAT);
        }
    };
    let metrics_path = opts.out.clone().unwrap_or_else(|| DEFAULT_METRICS.into());
    write_file(&metrics_path, |f| write_metrics(&run.metrics, f))?;
    if let Some(log) = &opts.log {
        write_log_file(log, &run.log)?;
    }

    match &run.summary {
        Summary::Hospital { cycles, applied, final_mae, .. } => {
            writeln!(out, "scenario: hospital, {cycles} cycles, {applied} applied")?;
            writeln!(out, "converged: no")?;
            match final_mae {
                Some(mae) => writeln!(out, "final MAE: {mae:.4}")?,
                None => writeln!(out, "final MAE: n/a")?,
            }
        }
        Summary::Conacq { cycles, converged, queries, informative, undecided, .. } => {
            writeln!(out, "scenario: conacq, {cycles} cycles")?;
            writeln!(out, "converged: {}", if *converged { "yes" } else { "no" })?;
            writeln!(out, "queries: {queries} ({informative} informative)")?;
            writeln!(out, "undecided: {undecided}")?;
        }
    }
    if let Some(why) = run.summary.failure() {
        writeln!(out, "stopped: {why}")?;
    }
    writeln!(out, "metrics: {}", metrics_path.display())?;
    writeln!(out, "wall time: {:.3} s", started.elapsed().as_secs_f64())?;
    Ok(if run.summary.failure().is_some() { EXIT_UNSAT } else { EXIT_OK })
}
