//! Constraint acquisition: the world is a user who labels assignments
//! against a hidden target network, and the learner narrows a version space
//! by asking about assignments the solver constructs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cp::{check, Assignment, Constraint, ConstraintNetwork, SolveOutcome, Solver};
use crate::icp::{
    Applied, Channels, ComponentBindings, CpSolver, Learned, Learner, ObservationsRepo, Pattern, PatternsRepo,
    Solved, SolutionsRepo,
};
use crate::ml::{vs_init, Candidate, ConstraintBias, Examples, LearningProblem, Relation, VersionSpace};

/// Failure notice sent back to the learner when no query can be built.
pub const NO_QUERY: &str = "not able to generate a satisfactory query";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConacqConfig {
    pub n_vars: usize,
    /// Values range over `1..=domain_size`.
    pub domain_size: i64,
    pub target: Vec<Candidate>,
    /// Relations of the bias; every pair is offered under each.
    pub relations: Vec<Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConacqError {
    #[error("{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConacqError {
    ConacqError::Invalid { field, reason: reason.into() }
}

impl ConacqConfig {
    pub fn bias(&self) -> ConstraintBias {
        ConstraintBias::complete(self.n_vars, 1, self.domain_size, &self.relations)
    }

    pub fn validate(&self) -> Result<(), ConacqError> {
        if self.n_vars < 2 {
            return Err(invalid("n_vars", "need at least two variables"));
        }
        if self.domain_size < 1 {
            return Err(invalid("domain_size", "must be positive"));
        }
        if self.relations.is_empty() {
            return Err(invalid("relations", "the bias needs at least one relation"));
        }
        let bias = self.bias();
        if let Some(c) = self.target.iter().find(|c| !bias.contains(c)) {
            return Err(invalid("target_constraints", format!("{c} is not in the bias")));
        }
        Ok(())
    }
}

/// The labelling user. The target is private.
#[derive(Debug, Clone)]
pub struct AcquisitionWorld {
    bias: ConstraintBias,
    target: ConstraintNetwork,
    example: Assignment,
}

impl AcquisitionWorld {
    /// Fails if the target has no solution.
    pub fn new(config: &ConacqConfig) -> Result<Self, ConacqError> {
        config.validate()?;
        let bias = config.bias();
        let constraints: Vec<Constraint> = config.target.iter().map(Candidate::to_constraint).collect();
        let target = bias.network(&constraints);
        let example = match Solver::default().solve(&target).map(|r| r.outcome) {
            Ok(SolveOutcome::Solution { assignment, .. }) => assignment,
            _ => return Err(invalid("target_constraints", "the target has no solution")),
        };
        Ok(AcquisitionWorld { bias, target, example })
    }

    pub fn n_vars(&self) -> usize {
        self.bias.n_vars
    }
}

/// Whether `e` satisfies every target constraint.
pub fn conacq_classify(w: &AcquisitionWorld, e: &Assignment) -> bool {
    check(e, &w.target).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConacqObservation {
    /// Number of variables and their common range.
    Signature { n_vars: usize, lo: i64, hi: i64 },
    Example { assignment: Assignment, label: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Signature {
    pub n_vars: usize,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConacqChannels;

impl Channels for ConacqChannels {
    type World = AcquisitionWorld;
    type Observation = ConacqObservation;
    type Solution = Assignment;
    type Problem = LearningProblem;
    type Network = Option<ConstraintNetwork>;
    type MlFragment = Vec<(Assignment, bool)>;
    type Feedback = String;
    type CpFragment = Signature;
    type PatternFragment = Option<Vec<Constraint>>;

    /// The variables, and one solution the user knows about.
    fn observe(&self, w: &AcquisitionWorld) -> Vec<ConacqObservation> {
        vec![
            ConacqObservation::Signature { n_vars: w.bias.n_vars, lo: w.bias.lo, hi: w.bias.hi },
            ConacqObservation::Example { assignment: w.example.clone(), label: true },
        ]
    }

    fn world_to_ml(&self, observations: &ObservationsRepo<ConacqObservation>) -> Vec<(Assignment, bool)> {
        observations
            .items()
            .filter_map(|o| match o {
                ConacqObservation::Example { assignment, label } => Some((assignment.clone(), *label)),
                _ => None,
            })
            .collect()
    }

    fn cp_to_ml(&self, _: &SolutionsRepo<Assignment>, failure: &str) -> String {
        failure.to_string()
    }

    fn construct_problem(&self, examples: Vec<(Assignment, bool)>, feedback: Option<String>) -> LearningProblem {
        let mut p = LearningProblem::acquisition(examples);
        p.solver_feedback = feedback;
        p
    }

    fn world_to_cp(&self, observations: &ObservationsRepo<ConacqObservation>) -> Signature {
        observations
            .items()
            .find_map(|o| match *o {
                ConacqObservation::Signature { n_vars, lo, hi } => Some(Signature { n_vars, lo, hi }),
                _ => None,
            })
            .unwrap_or_default()
    }

    fn ml_to_cp(&self, patterns: &PatternsRepo, _: &Signature) -> Result<Option<Vec<Constraint>>, String> {
        match patterns.last().map(|r| &r.item) {
            Some(Pattern::Constraints { query, .. }) => Ok(query.clone()),
            _ => Err("no constraint pattern to build a query from".to_string()),
        }
    }

    fn construct_network(&self, sig: Signature, query: Option<Vec<Constraint>>) -> Option<ConstraintNetwork> {
        query.map(|constraints| ConstraintBias::new(sig.n_vars, sig.lo, sig.hi, Vec::new()).map_or_else(
            |_| ConstraintNetwork::new(),
            |b| b.network(&constraints),
        ))
    }

    fn apply_to_world(
        &self,
        solutions: &SolutionsRepo<Assignment>,
        w: &mut AcquisitionWorld,
        _: &mut ChaCha8Rng,
    ) -> Applied<ConacqObservation> {
        match solutions.last().and_then(|r| r.item.solution.as_ref()) {
            Some(e) if e.len() == w.n_vars() => {
                let label = conacq_classify(w, e);
                Applied::Applied(vec![ConacqObservation::Example { assignment: e.clone(), label }])
            }
            _ => Applied::NotApplicable("no query to classify".to_string()),
        }
    }
}

/// Keeps a version space across cycles and feeds it the examples it has not
/// seen yet.
#[derive(Debug, Clone)]
pub struct AcquisitionLearner {
    vs: VersionSpace,
    solver: Solver,
    seen: usize,
    informative: usize,
}

impl AcquisitionLearner {
    pub fn new(bias: ConstraintBias) -> Result<Self, crate::ml::MlError> {
        Ok(AcquisitionLearner { vs: vs_init(bias)?, solver: Solver::default(), seen: 0, informative: 0 })
    }

    pub fn version_space(&self) -> &VersionSpace {
        &self.vs
    }

    /// Examples processed so far.
    pub fn examples_seen(&self) -> usize {
        self.seen
    }

    /// Examples that changed the version space.
    pub fn informative(&self) -> usize {
        self.informative
    }
}

impl Learner<LearningProblem> for AcquisitionLearner {
    fn learn(&mut self, problem: &LearningProblem) -> Result<Learned, String> {
        let Examples::Classified(examples) = &problem.examples else {
            return Err("expected classified examples".to_string());
        };
        if problem.solver_feedback.is_some() {
            return Ok(Learned::Converged);
        }
        for (e, label) in &examples[self.seen.min(examples.len())..] {
            let u = self.vs.update(e, *label).map_err(|err| err.to_string())?;
            if u.changed() {
                self.informative += 1;
            }
        }
        self.seen = examples.len();
        let confirmed = self.vs.hypothesis();
        let misclassified =
            examples.iter().filter(|(e, label)| confirmed_holds(&self.vs, e) != *label).count();
        let query = self.vs.generate_query(&self.solver).map(|q| q.constraints);
        Ok(Learned::Pattern {
            pattern: Pattern::Constraints { confirmed, query },
            loss: Some(misclassified as f64),
        })
    }
}

fn confirmed_holds(vs: &VersionSpace, e: &Assignment) -> bool {
    vs.confirmed().iter().all(|c| c.holds(e))
}

/// Solves the query network.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuerySolver {
    pub solver: Solver,
}

impl CpSolver<Option<ConstraintNetwork>> for QuerySolver {
    type Solution = Assignment;

    fn solve(&mut self, network: &Option<ConstraintNetwork>) -> Solved<Assignment> {
        let Some(network) = network else {
            return Solved { solution: None, objective: None, nodes: 0, failure: Some(NO_QUERY.to_string()) };
        };
        match self.solver.solve(network) {
            Ok(r) => {
                let failure = r.assignment().is_none().then(|| NO_QUERY.to_string());
                Solved { solution: r.assignment().cloned(), objective: None, nodes: r.nodes, failure }
            }
            Err(e) => Solved { solution: None, objective: None, nodes: 0, failure: Some(e.to_string()) },
        }
    }
}

pub type ConacqBindings = ComponentBindings<ConacqChannels, AcquisitionLearner, QuerySolver>;

pub fn make_conacq(config: &ConacqConfig) -> Result<(AcquisitionWorld, ConacqBindings), ConacqError> {
    let world = AcquisitionWorld::new(config)?;
    let learner = AcquisitionLearner::new(config.bias()).map_err(|e| invalid("relations", e.to_string()))?;
    Ok((world, ComponentBindings { channels: ConacqChannels, learner, solver: QuerySolver::default() }))
}
