use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cp::Constraint;
use crate::ml::LinearHypothesis;

/// An entry stamped with the cycle that wrote it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record<T> {
    pub cycle: u64,
    pub item: T,
}

/// Append-only log. Entries can be read and added, never changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repo<T> {
    records: Vec<Record<T>>,
}

impl<T> Default for Repo<T> {
    fn default() -> Self {
        Repo { records: Vec::new() }
    }
}

impl<T> Repo<T> {
    pub fn append(&mut self, cycle: u64, item: T) {
        self.records.push(Record { cycle, item });
    }

    pub fn records(&self) -> &[Record<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record<T>> {
        self.records.last()
    }

    pub fn items(&self) -> impl DoubleEndedIterator<Item = &T> {
        self.records.iter().map(|r| &r.item)
    }

    /// Items written during `cycle`.
    pub fn in_cycle(&self, cycle: u64) -> impl Iterator<Item = &T> {
        self.records.iter().filter(move |r| r.cycle == cycle).map(|r| &r.item)
    }
}

/// What the learner produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Pattern {
    Linear(LinearHypothesis),
    /// Confirmed constraints, plus the network whose solutions are the next
    /// query (absent when no query could be built).
    Constraints { confirmed: Vec<Constraint>, query: Option<Vec<Constraint>> },
}

impl Pattern {
    pub fn is_well_formed(&self) -> bool {
        match self {
            Pattern::Linear(h) => !h.weights.is_empty() && h.weights.iter().all(|w| w.is_finite()),
            Pattern::Constraints { confirmed, query } => {
                confirmed.iter().chain(query.iter().flatten()).all(|c| !c.scope().is_empty())
            }
        }
    }
}

/// A solver result, with whether the world accepted it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry<S> {
    /// `None` when the solver produced nothing.
    pub solution: Option<S>,
    pub objective: Option<i64>,
    applied: Option<bool>,
}

impl<S> SolutionEntry<S> {
    pub fn new(solution: Option<S>, objective: Option<i64>) -> Self {
        SolutionEntry { solution, objective, applied: None }
    }

    /// `None` until the loop has tried to apply the entry.
    pub fn applied(&self) -> Option<bool> {
        self.applied
    }
}

pub type ObservationsRepo<O> = Repo<O>;
pub type PatternsRepo = Repo<Pattern>;
pub type SolutionsRepo<S> = Repo<SolutionEntry<S>>;

impl<S> Repo<SolutionEntry<S>> {
    /// Records the outcome of applying the newest entry. The flag can be set
    /// once; later calls return `false` and change nothing.
    pub(crate) fn settle_last(&mut self, applied: bool) -> bool {
        match self.records.last_mut() {
            Some(r) if r.item.applied.is_none() => {
                r.item.applied = Some(applied);
                true
            }
            _ => false,
        }
    }
}
