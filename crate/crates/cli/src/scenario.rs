//! Runs a configured scenario through the loop and collects its metrics.

use icp_core::icp::{CycleReport, CycleStatus, IcpLoop, LoopError};
use icp_core::worlds::{make_conacq, make_hospital, prediction_error, HospitalObservation};

use crate::config::{ConfigError, ScenarioConfig, World};
use crate::log::{log_records, LogRecord};
use crate::metrics::CycleMetrics;

#[derive(Debug, Clone, PartialEq)]
pub enum Summary {
    Hospital { cycles: u64, applied: u64, final_mae: Option<f64>, failure: Option<String> },
    Conacq { cycles: u64, converged: bool, queries: u64, informative: usize, undecided: usize, failure: Option<String> },
}

impl Summary {
    pub fn failure(&self) -> Option<&str> {
        match self {
            Summary::Hospital { failure, .. } | Summary::Conacq { failure, .. } => failure.as_deref(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub reports: Vec<CycleReport>,
    pub metrics: Vec<CycleMetrics>,
    pub summary: Summary,
    pub log: Vec<LogRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("cannot serialize the repositories: {0}")]
    Log(#[from] std::io::Error),
}

fn base_metrics(r: &CycleReport) -> CycleMetrics {
    let (status, failure) = match &r.status {
        CycleStatus::Applied => ("applied", None),
        CycleStatus::Converged => ("converged", None),
        CycleStatus::Failed(why) => ("failed", Some(why.clone())),
    };
    CycleMetrics {
        cycle: r.cycle,
        status: status.to_string(),
        failure,
        applied: r.status == CycleStatus::Applied,
        converged: r.status == CycleStatus::Converged,
        retries: r.retries,
        nodes: r.nodes,
        learner_loss: r.learner_loss,
        prediction_mae: None,
        objective: r.objective,
        makespan: None,
        violations: None,
        undecided: None,
        informative: None,
    }
}

fn failure_of(reports: &[CycleReport]) -> Option<String> {
    match reports.last().map(|r| &r.status) {
        Some(CycleStatus::Failed(why)) => Some(why.clone()),
        _ => None,
    }
}

/// Validates `config` and runs it for `config.cycles` cycles, stopping
/// early on convergence or a failed cycle.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun, RunError> {
    let world = config.validate()?;
    let (seed, retry_limit) = (config.seed, config.retry_limit);
    match world {
        World::Hospital(h) => {
            let (world, bindings) =
                make_hospital(h, seed).map_err(|e| ConfigError::Invalid { field: "hospital".into(), reason: e.to_string() })?;
            let mut icp = IcpLoop::new(world, bindings, seed).with_retry_limit(retry_limit);
            let mut reports = Vec::new();
            let mut metrics = Vec::new();
            for _ in 0..config.cycles {
                let r = icp.step()?;
                let s = icp.state();
                let mut m = base_metrics(&r);
                m.prediction_mae = prediction_error(&s.patterns, &s.observations, r.cycle);
                if let Some((makespan, violations)) = s.observations.in_cycle(r.cycle).find_map(|o| match o {
                    HospitalObservation::Score { makespan, violations } => Some((*makespan, *violations)),
                    _ => None,
                }) {
                    m.makespan = Some(makespan);
                    m.violations = Some(violations);
                }
                metrics.push(m);
                let stop = r.is_final();
                reports.push(r);
                if stop {
                    break;
                }
            }
            let summary = Summary::Hospital {
                cycles: reports.len() as u64,
                applied: reports.iter().filter(|r| r.status == CycleStatus::Applied).count() as u64,
                final_mae: metrics.iter().rev().find_map(|m| m.prediction_mae),
                failure: failure_of(&reports),
            };
            let log = log_records(icp.state())?;
            Ok(ScenarioRun { reports, metrics, summary, log })
        }
        World::Conacq(c) => {
            let (world, bindings) = make_conacq(&c)?;
            let mut icp = IcpLoop::new(world, bindings, seed).with_retry_limit(retry_limit);
            let mut reports = Vec::new();
            let mut metrics = Vec::new();
            for _ in 0..config.cycles {
                let r = icp.step()?;
                let learner = &icp.bindings.learner;
                let mut m = base_metrics(&r);
                m.undecided = Some(learner.version_space().undecided().len());
                m.informative = Some(learner.informative());
                metrics.push(m);
                let stop = r.is_final();
                reports.push(r);
                if stop {
                    break;
                }
            }
            let learner = &icp.bindings.learner;
            let summary = Summary::Conacq {
                cycles: reports.len() as u64,
                converged: reports.last().is_some_and(|r| r.status == CycleStatus::Converged),
                queries: reports.iter().filter(|r| r.status == CycleStatus::Applied).count() as u64,
                informative: learner.informative(),
                undecided: learner.version_space().undecided().len(),
                failure: failure_of(&reports),
            };
            let log = log_records(icp.state())?;
            Ok(ScenarioRun { reports, metrics, summary, log })
        }
    }
}

impl From<icp_core::worlds::ConacqError> for RunError {
    fn from(e: icp_core::worlds::ConacqError) -> Self {
        let icp_core::worlds::ConacqError::Invalid { field, reason } = e;
        RunError::Config(ConfigError::Invalid { field: format!("conacq.{field}"), reason })
    }
}
