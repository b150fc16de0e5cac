//! Depth-first search with propagation at every node, and branch-and-bound
//! on top of it for networks with an objective.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::network::{Assignment, ConstraintNetwork, NetworkError, VarId};
use super::propagate::Propagator;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    /// `objective` is set when the search minimized.
    Solution { assignment: Assignment, objective: Option<i64> },
    /// Proven by exhausting the search tree.
    Unsat,
    /// The node budget ran out. A minimization keeps its best incumbent.
    BudgetExceeded { nodes: u64, incumbent: Option<(Assignment, i64)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub outcome: SolveOutcome,
    /// Branch decisions taken.
    pub nodes: u64,
}

impl SearchResult {
    pub fn assignment(&self) -> Option<&Assignment> {
        match &self.outcome {
            SolveOutcome::Solution { assignment, .. } => Some(assignment),
            SolveOutcome::BudgetExceeded { incumbent: Some((a, _)), .. } => Some(a),
            _ => None,
        }
    }

    pub fn objective(&self) -> Option<i64> {
        match &self.outcome {
            SolveOutcome::Solution { objective, .. } => *objective,
            SolveOutcome::BudgetExceeded { incumbent: Some((_, v)), .. } => Some(*v),
            _ => None,
        }
    }
}

/// Smallest-domain-first, lowest index on ties, values ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solver {
    pub budget: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { budget: DEFAULT_BUDGET }
    }
}

struct OutOfBudget;

struct Search<'a> {
    propagator: Propagator<'a>,
    budget: u64,
    nodes: u64,
    objective: Option<VarId>,
    /// Upper bound posted by branch-and-bound.
    bound: Option<i64>,
    best: Option<(Assignment, Option<i64>)>,
}

impl Solver {
    pub fn new(budget: u64) -> Self {
        Solver { budget }
    }

    /// First solution in search order, ignoring any objective.
    pub fn solve(&self, network: &ConstraintNetwork) -> Result<SearchResult, NetworkError> {
        self.run(network, None)
    }

    /// Branch-and-bound: each incumbent of value `v` posts `objective ≤ v − 1`
    /// and the search carries on until the tree is exhausted.
    pub fn minimize(&self, network: &ConstraintNetwork) -> Result<SearchResult, NetworkError> {
        let objective = network.objective().ok_or(NetworkError::NoObjective)?;
        self.run(network, Some(objective))
    }

    fn run(
        &self,
        network: &ConstraintNetwork,
        objective: Option<VarId>,
    ) -> Result<SearchResult, NetworkError> {
        let mut domains = network.initial_domains()?;
        let mut search = Search {
            propagator: Propagator::new(network),
            budget: self.budget,
            nodes: 0,
            objective,
            bound: None,
            best: None,
        };
        let finished = match search.propagator.run_all(&mut domains) {
            Err(_) => true,
            Ok(()) => search.explore(domains).is_ok(),
        };
        let nodes = search.nodes;
        let outcome = match (finished, search.best) {
            (true, Some((assignment, objective))) => SolveOutcome::Solution { assignment, objective },
            (true, None) => SolveOutcome::Unsat,
            (false, best) => SolveOutcome::BudgetExceeded {
                nodes,
                incumbent: best.and_then(|(a, v)| v.map(|v| (a, v))),
            },
        };
        Ok(SearchResult { outcome, nodes })
    }
}

impl Search<'_> {
    /// `Ok(true)` stops a satisfaction search at its first solution.
    fn explore(&mut self, domains: Vec<Domain>) -> Result<bool, OutOfBudget> {
        let Some(var) = select(&domains) else {
            let assignment = Assignment::new(domains.iter().map(|d| d.value().unwrap()).collect());
            return Ok(match self.objective {
                None => {
                    self.best = Some((assignment, None));
                    true
                }
                Some(obj) => {
                    let value = assignment.get(obj);
                    self.best = Some((assignment, Some(value)));
                    self.bound = Some(value - 1);
                    false
                }
            });
        };
        for value in domains[var.0].iter() {
            if self.nodes >= self.budget {
                return Err(OutOfBudget);
            }
            self.nodes += 1;
            let mut child = domains.clone();
            child[var.0].assign(value);
            let mut touched = alloc::vec![var];
            if let (Some(obj), Some(bound)) = (self.objective, self.bound) {
                if child[obj.0].remove_above(bound) {
                    touched.push(obj);
                }
            }
            if self.propagator.run_from(&touched, &mut child).is_ok() && self.explore(child)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn select(domains: &[Domain]) -> Option<VarId> {
    domains
        .iter()
        .enumerate()
        .filter(|(_, d)| d.len() > 1)
        .min_by_key(|(i, d)| (d.len(), *i))
        .map(|(i, _)| VarId(i))
}
