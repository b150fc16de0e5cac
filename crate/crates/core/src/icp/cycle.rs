use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bindings::{Applied, Channels, ComponentBindings, CpSolver, Learned, Learner};
use super::repo::{ObservationsRepo, PatternsRepo, SolutionEntry, SolutionsRepo};
use super::LoopError;

pub const DEFAULT_RETRY_LIMIT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelName {
    WorldToMl,
    CpToMl,
    WorldToCp,
    MlToCp,
    ApplyToWorld,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// The channels whose output the learner received.
    Learn { inputs: Vec<ChannelName> },
    Solve,
    Apply { applied: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// Logical time, increasing over the whole run.
    pub clock: u64,
    /// 0 for the first attempt, then one more per retry.
    pub attempt: u32,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleStatus {
    Applied,
    Converged,
    Failed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoSizes {
    pub observations: usize,
    pub patterns: usize,
    pub solutions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle: u64,
    pub status: CycleStatus,
    pub retries: u32,
    pub steps: Vec<Step>,
    /// Loss of the newest pattern.
    pub learner_loss: Option<f64>,
    /// Objective of the newest solve.
    pub objective: Option<i64>,
    /// Search nodes over all attempts.
    pub nodes: u64,
    /// Repository lengths when the cycle ended.
    pub sizes: RepoSizes,
}

impl CycleReport {
    pub fn is_final(&self) -> bool {
        !matches!(self.status, CycleStatus::Applied)
    }

    /// Learn before solve before apply within every attempt, clocks
    /// increasing, and the learner fed by the two ML channels only.
    pub fn ordering_holds(&self) -> bool {
        let clocks_increase = self.steps.windows(2).all(|w| w[0].clock < w[1].clock);
        let rank = |k: &StepKind| match k {
            StepKind::Learn { .. } => 0,
            StepKind::Solve => 1,
            StepKind::Apply { .. } => 2,
        };
        let per_attempt = self.steps.windows(2).all(|w| {
            w[0].attempt < w[1].attempt || (w[0].attempt == w[1].attempt && rank(&w[0].kind) < rank(&w[1].kind))
        });
        let inputs_ok = self.steps.iter().all(|s| match &s.kind {
            StepKind::Learn { inputs } => {
                inputs.iter().all(|c| matches!(c, ChannelName::WorldToMl | ChannelName::CpToMl))
            }
            _ => true,
        });
        clocks_increase && per_attempt && inputs_ok
    }
}

/// Repositories and bookkeeping carried from cycle to cycle.
#[derive(Debug, Clone)]
pub struct LoopState<O, S> {
    pub observations: ObservationsRepo<O>,
    pub patterns: PatternsRepo,
    pub solutions: SolutionsRepo<S>,
    cycle: u64,
    rng: ChaCha8Rng,
    retry_depth: u32,
    clock: u64,
}

impl<O, S> LoopState<O, S> {
    pub fn new(seed: u64) -> Self {
        LoopState {
            observations: ObservationsRepo::default(),
            patterns: PatternsRepo::default(),
            solutions: SolutionsRepo::default(),
            cycle: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            retry_depth: 0,
            clock: 0,
        }
    }

    /// The last cycle started; 0 before the first.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Retries taken by the last cycle.
    pub fn retry_depth(&self) -> u32 {
        self.retry_depth
    }

    pub fn sizes(&self) -> RepoSizes {
        RepoSizes {
            observations: self.observations.len(),
            patterns: self.patterns.len(),
            solutions: self.solutions.len(),
        }
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }
}

/// A world, its bindings and the loop state.
pub struct IcpLoop<C: Channels, L, S> {
    pub bindings: ComponentBindings<C, L, S>,
    world: C::World,
    state: LoopState<C::Observation, C::Solution>,
    retry_limit: u32,
}

impl<C, L, S> IcpLoop<C, L, S>
where
    C: Channels,
    L: Learner<C::Problem>,
    S: CpSolver<C::Network, Solution = C::Solution>,
{
    /// Stores the world's initial observations under cycle 0.
    pub fn new(world: C::World, bindings: ComponentBindings<C, L, S>, seed: u64) -> Self {
        let mut state = LoopState::new(seed);
        for o in bindings.channels.observe(&world) {
            state.observations.append(0, o);
        }
        IcpLoop { bindings, world, state, retry_limit: DEFAULT_RETRY_LIMIT }
    }

    pub fn with_retry_limit(mut self, retry_limit: u32) -> Self {
        self.retry_limit = retry_limit;
        self
    }

    pub fn retry_limit(&self) -> u32 {
        self.retry_limit
    }

    pub fn world(&self) -> &C::World {
        &self.world
    }

    pub fn state(&self) -> &LoopState<C::Observation, C::Solution> {
        &self.state
    }

    /// One cycle: learn, solve, apply; an inapplicable or missing solution
    /// sends the failure back through `cp_to_ml` and the cycle starts over
    /// on the same observations, at most `retry_limit` times.
    pub fn step(&mut self) -> Result<CycleReport, LoopError> {
        self.state.cycle += 1;
        let cycle = self.state.cycle;
        let channels = &self.bindings.channels;
        let mut report = CycleReport {
            cycle,
            status: CycleStatus::Applied,
            retries: 0,
            steps: Vec::new(),
            learner_loss: None,
            objective: None,
            nodes: 0,
            sizes: self.state.sizes(),
        };
        let mut failure: Option<String> = None;
        for attempt in 0..=self.retry_limit {
            report.retries = attempt;
            self.state.retry_depth = attempt;

            let world_part = channels.world_to_ml(&self.state.observations);
            let mut inputs = vec![ChannelName::WorldToMl];
            let feedback = failure.as_deref().map(|f| {
                inputs.push(ChannelName::CpToMl);
                channels.cp_to_ml(&self.state.solutions, f)
            });
            let problem = channels.construct_problem(world_part, feedback);
            let learned = self.bindings.learner.learn(&problem);
            let clock = self.state.tick();
            report.steps.push(Step { clock, attempt, kind: StepKind::Learn { inputs } });
            match learned {
                Err(reason) => {
                    report.status = CycleStatus::Failed(reason);
                    break;
                }
                Ok(Learned::Converged) => {
                    report.status = CycleStatus::Converged;
                    break;
                }
                Ok(Learned::Pattern { pattern, loss }) => {
                    report.learner_loss = loss;
                    self.state.patterns.append(cycle, pattern);
                }
            }

            if self.state.patterns.last().map(|r| r.cycle) != Some(cycle) {
                return Err(LoopError::MissingPattern { cycle });
            }
            let structure = channels.world_to_cp(&self.state.observations);
            let learned = match channels.ml_to_cp(&self.state.patterns, &structure) {
                Ok(l) => l,
                Err(reason) => {
                    report.status = CycleStatus::Failed(reason);
                    break;
                }
            };
            let network = channels.construct_network(structure, learned);
            let solved = self.bindings.solver.solve(&network);
            let clock = self.state.tick();
            report.steps.push(Step { clock, attempt, kind: StepKind::Solve });
            report.nodes += solved.nodes;
            report.objective = solved.objective;
            let produced = solved.solution.is_some();
            self.state.solutions.append(cycle, SolutionEntry::new(solved.solution, solved.objective));
            if !produced {
                self.state.solutions.settle_last(false);
                let reason = solved.failure.unwrap_or_else(|| String::from("no solution"));
                report.status = CycleStatus::Failed(reason.clone());
                failure = Some(reason);
                continue;
            }

            let outcome = channels.apply_to_world(&self.state.solutions, &mut self.world, &mut self.state.rng);
            let applied = matches!(outcome, Applied::Applied(_));
            self.state.solutions.settle_last(applied);
            let clock = self.state.tick();
            report.steps.push(Step { clock, attempt, kind: StepKind::Apply { applied } });
            match outcome {
                Applied::Applied(batch) => {
                    for o in batch {
                        self.state.observations.append(cycle, o);
                    }
                    report.status = CycleStatus::Applied;
                    break;
                }
                Applied::NotApplicable(reason) => {
                    report.status = CycleStatus::Failed(reason.clone());
                    failure = Some(reason);
                }
            }
        }
        report.sizes = self.state.sizes();
        Ok(report)
    }

    /// Runs until `n_cycles` cycles have run or one converges or fails.
    pub fn run(&mut self, n_cycles: u64) -> Result<Vec<CycleReport>, LoopError> {
        if n_cycles == 0 {
            return Err(LoopError::NoCycles);
        }
        let mut trace = Vec::new();
        for _ in 0..n_cycles {
            let report = self.step()?;
            let stop = report.is_final();
            trace.push(report);
            if stop {
                break;
            }
        }
        Ok(trace)
    }
}

/// Builds a loop and runs it; returns the trace and the finished loop.
#[allow(clippy::type_complexity)]
pub fn run_loop<C, L, S>(
    world: C::World,
    bindings: ComponentBindings<C, L, S>,
    n_cycles: u64,
    seed: u64,
    retry_limit: u32,
) -> Result<(Vec<CycleReport>, IcpLoop<C, L, S>), LoopError>
where
    C: Channels,
    L: Learner<C::Problem>,
    S: CpSolver<C::Network, Solution = C::Solution>,
{
    let mut icp = IcpLoop::new(world, bindings, seed).with_retry_limit(retry_limit);
    let trace = icp.run(n_cycles)?;
    Ok((trace, icp))
}
