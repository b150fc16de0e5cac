//! A hospital whose task durations depend linearly on patient features.
//!
//! The world hides the true weights. Each cycle it receives a schedule for
//! the pending tasks, runs it with the actual durations, reports what
//! happened, and admits new patients. A task's feature vector is the
//! patient's features followed by one indicator per task template except
//! the first.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cp::{build_schedule, ScheduleInstance, SolveOutcome, Solver};
use crate::icp::{
    Applied, Channels, ComponentBindings, CpSolver, Learned, Learner, ObservationsRepo, Pattern, PatternsRepo,
    Solved, SolutionsRepo,
};
use crate::ml::{fit_linear, fit_linear_default, loss, predict, Dataset, Examples, LearningProblem};

/// Slack below an integer that still rounds up to it, so a fit that is
/// exact up to floating-point noise yields the exact duration.
pub const CEIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskTemplate {
    /// Demand per resource.
    pub usage: Vec<i64>,
    /// Template of the same patient that has to finish first.
    pub prev: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HospitalConfig {
    /// Length of a task's feature vector.
    pub features: usize,
    /// Feature weights followed by the intercept.
    pub true_weights: Vec<f64>,
    pub noise_sigma: f64,
    /// Inclusive integer range per patient feature.
    pub feature_ranges: Vec<(i64, i64)>,
    pub arrivals_per_cycle: usize,
    pub bootstrap_history: usize,
    /// Capacity per resource.
    pub capacities: Vec<i64>,
    pub task_templates: Vec<TaskTemplate>,
    /// Latest start, and the upper clamp of every duration.
    pub max_time: i64,
    #[serde(default)]
    pub gap: i64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HospitalError {
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> HospitalError {
    HospitalError::Invalid { field, reason: reason.into() }
}

impl HospitalConfig {
    pub fn validate(&self) -> Result<(), HospitalError> {
        if self.task_templates.is_empty() {
            return Err(invalid("task_templates", "at least one template is needed"));
        }
        let expected = self.feature_ranges.len() + self.task_templates.len() - 1;
        if self.features != expected {
            return Err(invalid(
                "features",
                format!("{} patient features and {} templates give {expected}", self.feature_ranges.len(), self.task_templates.len()),
            ));
        }
        if self.true_weights.len() != self.features + 1 {
            return Err(invalid("true_weights", format!("expected {} weights", self.features + 1)));
        }
        if self.true_weights.iter().any(|w| !w.is_finite()) {
            return Err(invalid("true_weights", "weights must be finite"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid("noise_sigma", "must be finite and non-negative"));
        }
        if let Some((lo, hi)) = self.feature_ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(invalid("feature_ranges", format!("empty range [{lo}, {hi}]")));
        }
        if self.arrivals_per_cycle == 0 {
            return Err(invalid("arrivals_per_cycle", "must be positive"));
        }
        if self.capacities.is_empty() || self.capacities.iter().any(|&c| c <= 0) {
            return Err(invalid("capacities", "need at least one resource, each with positive capacity"));
        }
        for (i, t) in self.task_templates.iter().enumerate() {
            if t.usage.len() != self.capacities.len() {
                return Err(invalid("task_templates", format!("template {i} lists {} usages", t.usage.len())));
            }
            if t.usage.iter().zip(&self.capacities).any(|(&u, &c)| u < 0 || u > c) {
                return Err(invalid("task_templates", format!("template {i} usage outside 0..=capacity")));
            }
            if t.prev.is_some_and(|p| p >= i) {
                return Err(invalid("task_templates", format!("template {i} must follow an earlier template")));
            }
        }
        if self.max_time <= 0 {
            return Err(invalid("max_time", "must be positive"));
        }
        if self.gap < 0 {
            return Err(invalid("gap", "must be non-negative"));
        }
        Ok(())
    }
}

/// `floor(x + 0.5)`.
pub fn round_half_up(x: f64) -> f64 {
    libm::floor(x + 0.5)
}

/// `clamp(ceil(p), 1, max_time)`, up to [`CEIL_TOLERANCE`].
pub fn planned_duration(p: f64, max_time: i64) -> i64 {
    let d = libm::ceil(p - CEIL_TOLERANCE);
    if d.is_nan() || d < 1.0 {
        1
    } else if d > max_time as f64 {
        max_time
    } else {
        d as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u64,
    pub patient: u64,
    pub template: usize,
    pub features: Vec<f64>,
    /// Task of the same patient that has to finish first.
    pub prev: Option<u64>,
    pub usage: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patient {
    pub id: u64,
    pub features: Vec<f64>,
    pub pending: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HospitalObservation {
    /// A task was executed and took `actual` time units.
    Duration { task: u64, features: Vec<f64>, actual: i64 },
    /// Tasks waiting for a schedule, with the resources available.
    Pending { tasks: Vec<Task>, capacities: Vec<i64>, max_time: i64, gap: i64 },
    /// How the last schedule went.
    Score { makespan: i64, violations: u64 },
}

#[derive(Debug, Clone)]
pub struct HospitalWorld {
    config: HospitalConfig,
    pending: Vec<Task>,
    patients: BTreeMap<u64, Patient>,
    history: Vec<(Task, i64)>,
    clock: i64,
    next_patient: u64,
    next_task: u64,
}

impl HospitalWorld {
    /// Seeds the history with `bootstrap_history` executed tasks and admits
    /// the first patients.
    pub fn new(config: HospitalConfig, seed: u64) -> Result<Self, HospitalError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = HospitalWorld {
            config,
            pending: Vec::new(),
            patients: BTreeMap::new(),
            history: Vec::new(),
            clock: 0,
            next_patient: 0,
            next_task: 0,
        };
        let templates = w.config.task_templates.len();
        for i in 0..w.config.bootstrap_history {
            let features = w.patient_features(&mut rng);
            let task = w.new_task(w.next_patient, i % templates, &features, None);
            w.next_patient += 1;
            let actual = w.actual_duration(&task.features, &mut rng);
            w.history.push((task, actual));
        }
        w.admit(&mut rng);
        Ok(w)
    }

    pub fn config(&self) -> &HospitalConfig {
        &self.config
    }

    pub fn pending(&self) -> &[Task] {
        &self.pending
    }

    pub fn patients(&self) -> &BTreeMap<u64, Patient> {
        &self.patients
    }

    pub fn history(&self) -> &[(Task, i64)] {
        &self.history
    }

    pub fn clock(&self) -> i64 {
        self.clock
    }

    /// Noise-free duration: `clamp(round(w·x + b), 1, max_time)`.
    pub fn true_duration(&self, features: &[f64]) -> i64 {
        self.duration_with_noise(features, 0.0)
    }

    fn duration_with_noise(&self, features: &[f64], noise: f64) -> i64 {
        let w = &self.config.true_weights;
        let mean = features.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + w[features.len()];
        let d = round_half_up(mean + noise);
        if d.is_nan() || d < 1.0 {
            1
        } else if d > self.config.max_time as f64 {
            self.config.max_time
        } else {
            d as i64
        }
    }

    fn actual_duration(&self, features: &[f64], rng: &mut ChaCha8Rng) -> i64 {
        let noise = Normal::new(0.0, self.config.noise_sigma).map(|n| n.sample(rng)).unwrap_or(0.0);
        self.duration_with_noise(features, noise)
    }

    fn patient_features(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.config.feature_ranges.iter().map(|&(lo, hi)| rng.random_range(lo..=hi) as f64).collect()
    }

    fn new_task(&mut self, patient: u64, template: usize, patient_features: &[f64], prev: Option<u64>) -> Task {
        let mut features = patient_features.to_vec();
        features.extend((1..self.config.task_templates.len()).map(|k| if k == template { 1.0 } else { 0.0 }));
        let id = self.next_task;
        self.next_task += 1;
        Task { id, patient, template, features, prev, usage: self.config.task_templates[template].usage.clone() }
    }

    fn admit(&mut self, rng: &mut ChaCha8Rng) {
        for _ in 0..self.config.arrivals_per_cycle {
            let features = self.patient_features(rng);
            let patient = self.next_patient;
            self.next_patient += 1;
            let mut ids: Vec<u64> = Vec::new();
            for k in 0..self.config.task_templates.len() {
                let prev = self.config.task_templates[k].prev.map(|p| ids[p]);
                let task = self.new_task(patient, k, &features, prev);
                ids.push(task.id);
                self.pending.push(task);
            }
            self.patients.insert(patient, Patient { id: patient, features, pending: ids });
        }
    }

    fn snapshot(&self) -> HospitalObservation {
        HospitalObservation::Pending {
            tasks: self.pending.clone(),
            capacities: self.config.capacities.clone(),
            max_time: self.config.max_time,
            gap: self.config.gap,
        }
    }
}

/// Every duration recorded so far plus the pending tasks. The weights stay
/// hidden.
pub fn hospital_observe(w: &HospitalWorld) -> Vec<HospitalObservation> {
    let mut out: Vec<HospitalObservation> = w
        .history
        .iter()
        .map(|(t, actual)| HospitalObservation::Duration { task: t.id, features: t.features.clone(), actual: *actual })
        .collect();
    out.push(w.snapshot());
    out
}

/// A schedule for the pending tasks, relative to the current clock.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HospitalSchedule {
    pub tasks: Vec<u64>,
    pub starts: Vec<i64>,
    /// Durations the schedule was planned with.
    pub planned: Vec<i64>,
}

/// Number of `(resource, time)` points where running tasks exceed the
/// capacity. `tasks` holds `(start, duration, usage)`.
pub fn capacity_violations(tasks: &[(i64, i64, &[i64])], capacities: &[i64]) -> u64 {
    let horizon = tasks.iter().map(|&(s, d, _)| s + d).max().unwrap_or(0);
    let mut count = 0;
    for (r, &cap) in capacities.iter().enumerate() {
        for t in 0..horizon {
            let load: i64 = tasks.iter().filter(|&&(s, d, _)| s <= t && t < s + d).map(|(_, _, u)| u[r]).sum();
            if load > cap {
                count += 1;
            }
        }
    }
    count
}

/// Runs `schedule` with the actual durations. The schedule has to cover
/// exactly the pending tasks with starts in `0..=max_time`.
pub fn hospital_apply(
    w: &mut HospitalWorld,
    schedule: &HospitalSchedule,
    rng: &mut ChaCha8Rng,
) -> Applied<HospitalObservation> {
    if schedule.starts.len() != schedule.tasks.len() {
        return Applied::NotApplicable("schedule lists a different number of tasks and starts".to_string());
    }
    let mut starts = BTreeMap::new();
    for (&id, &s) in schedule.tasks.iter().zip(&schedule.starts) {
        if !w.pending.iter().any(|t| t.id == id) {
            return Applied::NotApplicable(format!("task {id} is not pending"));
        }
        if !(0..=w.config.max_time).contains(&s) {
            return Applied::NotApplicable(format!("task {id} starts at {s}"));
        }
        starts.insert(id, s);
    }
    if let Some(t) = w.pending.iter().find(|t| !starts.contains_key(&t.id)) {
        return Applied::NotApplicable(format!("task {} is missing from the schedule", t.id));
    }

    let tasks = core::mem::take(&mut w.pending);
    let actual: Vec<i64> = tasks.iter().map(|t| w.actual_duration(&t.features, rng)).collect();
    let runs: Vec<(i64, i64, &[i64])> =
        tasks.iter().zip(&actual).map(|(t, &d)| (starts[&t.id], d, t.usage.as_slice())).collect();
    let makespan = runs.iter().map(|&(s, d, _)| s + d).max().unwrap_or(0);
    let violations = capacity_violations(&runs, &w.config.capacities);

    let mut out = Vec::new();
    for (t, &d) in tasks.iter().zip(&actual) {
        out.push(HospitalObservation::Duration { task: t.id, features: t.features.clone(), actual: d });
        if let Some(p) = w.patients.get_mut(&t.patient) {
            p.pending.retain(|&id| id != t.id);
        }
    }
    w.patients.retain(|_, p| !p.pending.is_empty());
    w.history.extend(tasks.into_iter().zip(actual));
    out.push(HospitalObservation::Score { makespan, violations });
    w.clock += makespan;
    w.admit(rng);
    out.push(w.snapshot());
    Applied::Applied(out)
}

/// What the solver side reads from the world: the newest pending snapshot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HospitalStructure {
    pub tasks: Vec<Task>,
    pub capacities: Vec<i64>,
    pub max_time: i64,
    pub gap: i64,
}

/// A schedule instance plus the task id behind each non-dummy index.
#[derive(Debug, Clone, PartialEq)]
pub struct HospitalNetwork {
    pub instance: ScheduleInstance,
    pub tasks: Vec<u64>,
}

/// The schedule instance for `structure` under the given durations. Tasks
/// whose predecessor already ran hang off the dummy.
pub fn schedule_instance(structure: &HospitalStructure, durations: &[i64]) -> HospitalNetwork {
    let index: BTreeMap<u64, usize> = structure.tasks.iter().enumerate().map(|(i, t)| (t.id, i + 1)).collect();
    let mut inst = ScheduleInstance {
        durations: vec![0],
        prev: vec![0],
        capacities: structure.capacities.clone(),
        usage: vec![vec![0]; structure.capacities.len()],
        max_time: structure.max_time,
        gap: structure.gap,
    };
    for (t, &d) in structure.tasks.iter().zip(durations) {
        inst.durations.push(d);
        inst.prev.push(t.prev.and_then(|p| index.get(&p).copied()).unwrap_or(0));
        for (r, row) in inst.usage.iter_mut().enumerate() {
            row.push(t.usage[r]);
        }
    }
    HospitalNetwork { instance: inst, tasks: structure.tasks.iter().map(|t| t.id).collect() }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HospitalChannels;

impl Channels for HospitalChannels {
    type World = HospitalWorld;
    type Observation = HospitalObservation;
    type Solution = HospitalSchedule;
    type Problem = LearningProblem;
    type Network = HospitalNetwork;
    type MlFragment = Dataset;
    type Feedback = ();
    type CpFragment = HospitalStructure;
    type PatternFragment = Vec<i64>;

    fn observe(&self, world: &HospitalWorld) -> Vec<HospitalObservation> {
        hospital_observe(world)
    }

    fn world_to_ml(&self, observations: &ObservationsRepo<HospitalObservation>) -> Dataset {
        let (mut rows, mut targets) = (Vec::new(), Vec::new());
        for o in observations.items() {
            if let HospitalObservation::Duration { features, actual, .. } = o {
                rows.push(features.clone());
                targets.push(*actual as f64);
            }
        }
        Dataset::new(rows, targets).unwrap_or_else(|_| Dataset::empty(0))
    }

    /// Not used by this scenario.
    fn cp_to_ml(&self, _: &SolutionsRepo<HospitalSchedule>, _: &str) {}

    fn construct_problem(&self, data: Dataset, _: Option<()>) -> LearningProblem {
        LearningProblem::regression(data)
    }

    fn world_to_cp(&self, observations: &ObservationsRepo<HospitalObservation>) -> HospitalStructure {
        observations
            .items()
            .rev()
            .find_map(|o| match o {
                HospitalObservation::Pending { tasks, capacities, max_time, gap } => Some(HospitalStructure {
                    tasks: tasks.clone(),
                    capacities: capacities.clone(),
                    max_time: *max_time,
                    gap: *gap,
                }),
                _ => None,
            })
            .unwrap_or_default()
    }

    fn ml_to_cp(&self, patterns: &PatternsRepo, structure: &HospitalStructure) -> Result<Vec<i64>, String> {
        let Some(Pattern::Linear(h)) = patterns.last().map(|r| &r.item) else {
            return Err("no linear hypothesis to predict durations with".to_string());
        };
        structure
            .tasks
            .iter()
            .map(|t| predict(h, &t.features).map(|p| planned_duration(p, structure.max_time)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())
    }

    fn construct_network(&self, structure: HospitalStructure, durations: Vec<i64>) -> HospitalNetwork {
        schedule_instance(&structure, &durations)
    }

    fn apply_to_world(
        &self,
        solutions: &SolutionsRepo<HospitalSchedule>,
        world: &mut HospitalWorld,
        rng: &mut ChaCha8Rng,
    ) -> Applied<HospitalObservation> {
        match solutions.last().and_then(|r| r.item.solution.as_ref()) {
            Some(s) => hospital_apply(world, s, rng),
            None => Applied::NotApplicable("no schedule to apply".to_string()),
        }
    }
}

/// Least squares over the duration records.
#[derive(Debug, Clone, Copy, Default)]
pub struct RegressionLearner {
    /// `None` fits without regularization, falling back to a tiny ridge if
    /// the system is singular.
    pub ridge: Option<f64>,
}

impl Learner<LearningProblem> for RegressionLearner {
    fn learn(&mut self, problem: &LearningProblem) -> Result<Learned, String> {
        let Examples::Regression(data) = &problem.examples else {
            return Err("expected a regression problem".to_string());
        };
        let h = match self.ridge {
            Some(r) => fit_linear(data, r),
            None => fit_linear_default(data),
        }
        .map_err(|e| e.to_string())?;
        let l = loss(data, &h).map_err(|e| e.to_string())?;
        Ok(Learned::Pattern { pattern: Pattern::Linear(h), loss: Some(l) })
    }
}

/// Branch-and-bound on the makespan.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScheduleSolver {
    pub solver: Solver,
}

impl CpSolver<HospitalNetwork> for ScheduleSolver {
    type Solution = HospitalSchedule;

    fn solve(&mut self, network: &HospitalNetwork) -> Solved<HospitalSchedule> {
        let failed = |reason: String| Solved { solution: None, objective: None, nodes: 0, failure: Some(reason) };
        let built = match build_schedule(&network.instance) {
            Ok(b) => b,
            Err(e) => return failed(e.to_string()),
        };
        let result = match self.solver.minimize(&built.network) {
            Ok(r) => r,
            Err(e) => return failed(e.to_string()),
        };
        let nodes = result.nodes;
        let failure = match &result.outcome {
            SolveOutcome::Unsat => Some("no schedule fits before max_time".to_string()),
            SolveOutcome::BudgetExceeded { incumbent: None, .. } => Some("search budget exhausted".to_string()),
            _ => None,
        };
        let solution = result.assignment().map(|a| HospitalSchedule {
            tasks: network.tasks.clone(),
            starts: built.starts[1..].iter().map(|&v| a.get(v)).collect(),
            planned: network.instance.durations[1..].to_vec(),
        });
        Solved { solution, objective: result.objective(), nodes, failure }
    }
}

pub type HospitalBindings = ComponentBindings<HospitalChannels, RegressionLearner, ScheduleSolver>;

/// The world plus its bindings.
pub fn make_hospital(config: HospitalConfig, seed: u64) -> Result<(HospitalWorld, HospitalBindings), HospitalError> {
    let world = HospitalWorld::new(config, seed)?;
    let bindings = ComponentBindings {
        channels: HospitalChannels,
        learner: RegressionLearner::default(),
        solver: ScheduleSolver::default(),
    };
    Ok((world, bindings))
}

/// Mean absolute difference between the newest hypothesis of `cycle` and
/// the durations observed in that cycle. `None` if either is missing.
pub fn prediction_error(
    patterns: &PatternsRepo,
    observations: &ObservationsRepo<HospitalObservation>,
    cycle: u64,
) -> Option<f64> {
    let h = patterns.in_cycle(cycle).filter_map(|p| match p {
        Pattern::Linear(h) => Some(h),
        _ => None,
    });
    let h = h.last()?;
    let errors: Vec<f64> = observations
        .in_cycle(cycle)
        .filter_map(|o| match o {
            HospitalObservation::Duration { features, actual, .. } => {
                predict(h, features).ok().map(|p| libm::fabs(p - *actual as f64))
            }
            _ => None,
        })
        .collect();
    (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64)
}
