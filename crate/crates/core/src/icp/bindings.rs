use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use super::repo::{ObservationsRepo, Pattern, PatternsRepo, SolutionsRepo};

/// The five channels of a scenario, plus how its world is first observed.
///
/// The learner only ever sees what `construct_problem` builds from
/// `world_to_ml` and `cp_to_ml`; the world is reachable from
/// `observe` and `apply_to_world` alone.
pub trait Channels {
    type World;
    type Observation: Clone;
    type Solution: Clone;
    /// What the learner consumes.
    type Problem;
    /// What the solver consumes.
    type Network;
    type MlFragment;
    type Feedback;
    type CpFragment;
    type PatternFragment;

    /// Observations available before the first cycle.
    fn observe(&self, world: &Self::World) -> Vec<Self::Observation>;

    fn world_to_ml(&self, observations: &ObservationsRepo<Self::Observation>) -> Self::MlFragment;

    /// Called only after a failed solve or an inapplicable solution.
    fn cp_to_ml(&self, solutions: &SolutionsRepo<Self::Solution>, failure: &str) -> Self::Feedback;

    /// Merges the world fragment with the feedback, the latter winning.
    fn construct_problem(&self, world: Self::MlFragment, feedback: Option<Self::Feedback>) -> Self::Problem;

    fn world_to_cp(&self, observations: &ObservationsRepo<Self::Observation>) -> Self::CpFragment;

    /// Reads the newest pattern. `structure` names what the pattern has to
    /// be evaluated on (the tasks to price, for instance).
    fn ml_to_cp(&self, patterns: &PatternsRepo, structure: &Self::CpFragment) -> Result<Self::PatternFragment, String>;

    fn construct_network(&self, structure: Self::CpFragment, learned: Self::PatternFragment) -> Self::Network;

    /// Executes the newest solution.
    fn apply_to_world(
        &self,
        solutions: &SolutionsRepo<Self::Solution>,
        world: &mut Self::World,
        rng: &mut ChaCha8Rng,
    ) -> Applied<Self::Observation>;
}

#[derive(Debug, Clone, PartialEq)]
pub enum Applied<O> {
    /// Executed; these observations were produced.
    Applied(Vec<O>),
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Learned {
    Pattern { pattern: Pattern, loss: Option<f64> },
    /// Nothing left to learn.
    Converged,
}

pub trait Learner<P> {
    fn learn(&mut self, problem: &P) -> Result<Learned, String>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved<S> {
    pub solution: Option<S>,
    pub objective: Option<i64>,
    pub nodes: u64,
    /// Why there is no solution.
    pub failure: Option<String>,
}

pub trait CpSolver<N> {
    type Solution;
    fn solve(&mut self, network: &N) -> Solved<Self::Solution>;
}

/// Everything a loop needs besides the world.
#[derive(Debug, Clone)]
pub struct ComponentBindings<C, L, S> {
    pub channels: C,
    pub learner: L,
    pub solver: S,
}
