//! The closed loop: three append-only repositories, the channels linking
//! world, learner and solver, and the cycle driving them.

use thiserror::Error;

mod bindings;
mod cycle;
mod repo;

pub use bindings::{Applied, Channels, ComponentBindings, CpSolver, Learned, Learner, Solved};
pub use cycle::{
    run_loop, ChannelName, CycleReport, CycleStatus, IcpLoop, LoopState, RepoSizes, Step, StepKind,
    DEFAULT_RETRY_LIMIT,
};
pub use repo::{ObservationsRepo, Pattern, PatternsRepo, Record, Repo, SolutionEntry, SolutionsRepo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("the number of cycles must be at least 1")]
    NoCycles,
    #[error("no pattern was written in cycle {cycle}")]
    MissingPattern { cycle: u64 },
}
