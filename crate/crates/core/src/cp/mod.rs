//! Finite-domain constraint networks and their solver.

mod check;
mod domain;
mod network;
mod propagate;
mod schedule;
mod search;
mod sudoku;

pub use check::{check, satisfies};
pub use domain::Domain;
pub use network::{
    Assignment, Constraint, ConstraintNetwork, Cumulative, CumulativeTask, Linear, NetworkError,
    Precedence, VarId, MAX_DOMAIN_SPAN,
};
pub use propagate::{propagate, Inconsistent};
pub use schedule::{build_schedule, ScheduleError, ScheduleInstance, ScheduleNetwork};
pub use search::{SearchResult, SolveOutcome, Solver, DEFAULT_BUDGET};
pub use sudoku::{build_sudoku, cell, grid_of, Grid};
