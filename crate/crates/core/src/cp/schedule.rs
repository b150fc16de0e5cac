//! Resource-constrained task scheduling with makespan minimization.
//!
//! Task `0` is a dummy that precedes every chain: duration 0, `prev[0] = 0`,
//! no resource use and no precedence constraint of its own.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::network::{
    Constraint, ConstraintNetwork, Cumulative, CumulativeTask, Linear, Precedence, VarId,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleInstance {
    /// Duration per task, dummy included.
    pub durations: Vec<i64>,
    /// Predecessor per task.
    pub prev: Vec<usize>,
    /// Capacity per resource.
    pub capacities: Vec<i64>,
    /// `usage[r][t]`: demand of task `t` on resource `r`.
    pub usage: Vec<Vec<i64>>,
    /// Latest allowed start.
    pub max_time: i64,
    /// Extra idle time between a task and its successor.
    pub gap: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("instance has no dummy task")]
    NoTasks,
    #[error("expected {expected} entries in {field}, found {found}")]
    Length { field: &'static str, expected: usize, found: usize },
    #[error("task {task} has predecessor {prev} which does not exist")]
    UnknownPredecessor { task: usize, prev: usize },
    #[error("predecessor chain through task {0} is cyclic")]
    Cycle(usize),
    #[error("dummy task must have duration 0 and prev 0")]
    BadDummy,
    #[error("negative {0}")]
    Negative(&'static str),
}

/// The network together with where its variables live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleNetwork {
    pub network: ConstraintNetwork,
    /// Start variable per task, dummy first.
    pub starts: Vec<VarId>,
    pub makespan: VarId,
}

impl ScheduleInstance {
    pub fn num_tasks(&self) -> usize {
        self.durations.len()
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        let n = self.num_tasks();
        if n == 0 {
            return Err(ScheduleError::NoTasks);
        }
        if self.prev.len() != n {
            return Err(ScheduleError::Length { field: "prev", expected: n, found: self.prev.len() });
        }
        if self.usage.len() != self.capacities.len() {
            return Err(ScheduleError::Length {
                field: "usage",
                expected: self.capacities.len(),
                found: self.usage.len(),
            });
        }
        if let Some(row) = self.usage.iter().find(|row| row.len() != n) {
            return Err(ScheduleError::Length { field: "usage row", expected: n, found: row.len() });
        }
        if self.durations[0] != 0 || self.prev[0] != 0 {
            return Err(ScheduleError::BadDummy);
        }
        if self.durations.iter().any(|&d| d < 0) {
            return Err(ScheduleError::Negative("duration"));
        }
        if self.capacities.iter().any(|&c| c < 0) {
            return Err(ScheduleError::Negative("capacity"));
        }
        if self.usage.iter().flatten().any(|&u| u < 0) {
            return Err(ScheduleError::Negative("usage"));
        }
        if self.max_time < 0 {
            return Err(ScheduleError::Negative("max_time"));
        }
        if let Some((task, &prev)) = self.prev.iter().enumerate().find(|(_, &p)| p >= n) {
            return Err(ScheduleError::UnknownPredecessor { task, prev });
        }
        // every chain has to reach the dummy within n steps
        for start in 1..n {
            let mut t = start;
            let mut steps = 0;
            while t != 0 {
                t = self.prev[t];
                steps += 1;
                if steps > n {
                    return Err(ScheduleError::Cycle(start));
                }
            }
        }
        Ok(())
    }
}

/// One start variable per task over `0..=max_time`, a cumulative constraint
/// per resource, a precedence per non-dummy task, and a makespan variable
/// bounded below by every task end and set as the objective.
pub fn build_schedule(inst: &ScheduleInstance) -> Result<ScheduleNetwork, ScheduleError> {
    inst.validate()?;
    let mut network = ConstraintNetwork::new();
    let starts: Vec<VarId> = (0..inst.num_tasks())
        .map(|t| network.add_var(format!("start[{t}]"), 0, inst.max_time))
        .collect();
    let longest = inst.durations.iter().copied().max().unwrap_or(0);
    let makespan = network.add_var("makespan", 0, inst.max_time + longest);

    for (r, &capacity) in inst.capacities.iter().enumerate() {
        let tasks = starts
            .iter()
            .enumerate()
            .map(|(t, &start)| CumulativeTask {
                start,
                duration: inst.durations[t],
                demand: inst.usage[r][t],
            })
            .collect();
        network.post(Constraint::Cumulative(Cumulative { tasks, capacity }));
    }
    for t in 1..inst.num_tasks() {
        let p = inst.prev[t];
        network.post(Constraint::Precedence(Precedence {
            before: starts[p],
            after: starts[t],
            duration: inst.durations[p],
            gap: inst.gap,
        }));
    }
    for (t, &start) in starts.iter().enumerate() {
        // start[t] + dur[t] <= makespan
        network.post(Constraint::LinearLe(Linear::new(
            vec![(1, start), (-1, makespan)],
            -inst.durations[t],
        )));
    }
    // redundant energy bound: capacity * makespan covers all demand
    for (r, &capacity) in inst.capacities.iter().enumerate() {
        let energy: i64 = (0..inst.num_tasks()).map(|t| inst.durations[t] * inst.usage[r][t]).sum();
        if energy > 0 {
            network.post(Constraint::LinearLe(Linear::new(vec![(-capacity, makespan)], -energy)));
        }
    }
    network.set_objective(makespan);
    Ok(ScheduleNetwork { network, starts, makespan })
}
