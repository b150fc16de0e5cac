//! Version-space acquisition of binary relational constraints.
//!
//! Each candidate relates an ordered variable pair by one of six relations.
//! A relation is encoded as the set of signs of `first − second` it admits,
//! so on a shared pair one candidate entails another exactly when its sign
//! set is a subset of the other's. Across pairs, entailment is decided
//! relative to the confirmed constraints by asking the solver whether
//! `confirmed ∧ u ∧ ¬c` has a solution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::MlError;
use crate::cp::{Assignment, Constraint, ConstraintNetwork, Linear, SolveOutcome, Solver, VarId};

const BELOW: u8 = 0b001;
const EQUAL: u8 = 0b010;
const ABOVE: u8 = 0b100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] =
        [Relation::Eq, Relation::Ne, Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge];

    fn signs(self) -> u8 {
        match self {
            Relation::Eq => EQUAL,
            Relation::Ne => BELOW | ABOVE,
            Relation::Lt => BELOW,
            Relation::Le => BELOW | EQUAL,
            Relation::Gt => ABOVE,
            Relation::Ge => ABOVE | EQUAL,
        }
    }

    pub fn negation(self) -> Relation {
        match self {
            Relation::Eq => Relation::Ne,
            Relation::Ne => Relation::Eq,
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Gt => Relation::Le,
            Relation::Ge => Relation::Lt,
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        let sign = match a.cmp(&b) {
            core::cmp::Ordering::Less => BELOW,
            core::cmp::Ordering::Equal => EQUAL,
            core::cmp::Ordering::Greater => ABOVE,
        };
        self.signs() & sign != 0
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.symbol() == s || (s == "≠" && *r == Relation::Ne))
    }
}

/// `X[first] relation X[second]` with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub first: VarId,
    pub second: VarId,
    pub relation: Relation,
}

impl Candidate {
    /// Normalizes the pair order, mirroring the relation if needed.
    pub fn new(a: VarId, b: VarId, relation: Relation) -> Self {
        if a <= b {
            Candidate { first: a, second: b, relation }
        } else {
            let mirrored = match relation {
                Relation::Lt => Relation::Gt,
                Relation::Le => Relation::Ge,
                Relation::Gt => Relation::Lt,
                Relation::Ge => Relation::Le,
                r => r,
            };
            Candidate { first: b, second: a, relation: mirrored }
        }
    }

    pub fn holds(&self, e: &Assignment) -> bool {
        self.relation.holds(e.get(self.first), e.get(self.second))
    }

    pub fn negated(&self) -> Candidate {
        Candidate { relation: self.relation.negation(), ..*self }
    }

    /// Every assignment satisfying `self` also satisfies `other`.
    pub fn entails(&self, other: &Candidate) -> bool {
        self.first == other.first
            && self.second == other.second
            && self.relation.signs() & !other.relation.signs() == 0
    }

    pub fn to_constraint(&self) -> Constraint {
        let (x, y) = (self.first, self.second);
        match self.relation {
            Relation::Eq => Constraint::LinearEq(Linear::new(vec![(1, x), (-1, y)], 0)),
            Relation::Ne => Constraint::AllDifferent(vec![x, y]),
            Relation::Lt => Constraint::LinearLe(Linear::new(vec![(1, x), (-1, y)], -1)),
            Relation::Le => Constraint::LinearLe(Linear::new(vec![(1, x), (-1, y)], 0)),
            Relation::Gt => Constraint::LinearLe(Linear::new(vec![(-1, x), (1, y)], -1)),
            Relation::Ge => Constraint::LinearLe(Linear::new(vec![(-1, x), (1, y)], 0)),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{} {} X{}", self.first.0 + 1, self.relation.symbol(), self.second.0 + 1)
    }
}

/// The constraint language: candidates over `n_vars` variables ranging over
/// `lo..=hi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintBias {
    pub n_vars: usize,
    pub lo: i64,
    pub hi: i64,
    candidates: Vec<Candidate>,
}

impl ConstraintBias {
    pub fn new(n_vars: usize, lo: i64, hi: i64, candidates: Vec<Candidate>) -> Result<Self, MlError> {
        let mut candidates = candidates;
        candidates.sort_unstable();
        candidates.dedup();
        if let Some(c) = candidates.iter().find(|c| c.second.0 >= n_vars || c.first == c.second) {
            return Err(MlError::BadCandidate(format!("{c}")));
        }
        Ok(ConstraintBias { n_vars, lo, hi, candidates })
    }

    /// Every variable pair under every relation in `relations`.
    pub fn complete(n_vars: usize, lo: i64, hi: i64, relations: &[Relation]) -> Self {
        let mut candidates = Vec::new();
        for i in 0..n_vars {
            for j in i + 1..n_vars {
                for &r in relations {
                    candidates.push(Candidate::new(VarId(i), VarId(j), r));
                }
            }
        }
        Self::new(n_vars, lo, hi, candidates).expect("pairs are in range")
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn contains(&self, c: &Candidate) -> bool {
        self.candidates.binary_search(c).is_ok()
    }

    /// Network over the acquisition variables holding `constraints`.
    pub fn network(&self, constraints: &[Constraint]) -> ConstraintNetwork {
        let mut n = ConstraintNetwork::new();
        for i in 0..self.n_vars {
            n.add_var(format!("X{}", i + 1), self.lo, self.hi);
        }
        for c in constraints {
            n.post(c.clone());
        }
        n
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VersionSpace {
    bias: ConstraintBias,
    undecided: BTreeSet<Candidate>,
    confirmed: BTreeSet<Candidate>,
    rejected: BTreeSet<Candidate>,
    /// Negative examples not yet explained by a confirmed candidate.
    pending_negatives: Vec<Assignment>,
    #[serde(skip)]
    implication_cache: RefCell<ImplicationCache>,
}

/// Implication verdicts, valid while the confirmed set has the given size.
type ImplicationCache = (usize, BTreeMap<(Candidate, Candidate), bool>);

impl PartialEq for VersionSpace {
    fn eq(&self, other: &Self) -> bool {
        self.bias == other.bias
            && self.undecided == other.undecided
            && self.confirmed == other.confirmed
            && self.rejected == other.rejected
            && self.pending_negatives == other.pending_negatives
    }
}

/// Membership changes caused by one example.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Update {
    pub rejected: Vec<Candidate>,
    pub confirmed: Vec<Candidate>,
}

impl Update {
    pub fn changed(&self) -> bool {
        !self.rejected.is_empty() || !self.confirmed.is_empty()
    }
}

/// A query: the assignment plus the network that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    /// The candidate the query is built to violate.
    pub target: Candidate,
    /// Whether every other violated undecided candidate implies `target`.
    pub near_miss: bool,
    pub constraints: Vec<Constraint>,
    pub assignment: Assignment,
}

/// Starts with every candidate undecided.
pub fn vs_init(bias: ConstraintBias) -> Result<VersionSpace, MlError> {
    if bias.candidates.is_empty() {
        return Err(MlError::EmptyBias);
    }
    Ok(VersionSpace {
        undecided: bias.candidates.iter().copied().collect(),
        confirmed: BTreeSet::new(),
        rejected: BTreeSet::new(),
        pending_negatives: Vec::new(),
        implication_cache: RefCell::default(),
        bias,
    })
}

impl VersionSpace {
    pub fn bias(&self) -> &ConstraintBias {
        &self.bias
    }

    pub fn undecided(&self) -> &BTreeSet<Candidate> {
        &self.undecided
    }

    pub fn confirmed(&self) -> &BTreeSet<Candidate> {
        &self.confirmed
    }

    pub fn rejected(&self) -> &BTreeSet<Candidate> {
        &self.rejected
    }

    pub fn pending_negatives(&self) -> &[Assignment] {
        &self.pending_negatives
    }

    /// The learned network as constraints.
    pub fn hypothesis(&self) -> Vec<Constraint> {
        self.confirmed.iter().map(Candidate::to_constraint).collect()
    }

    fn solvable(&self, solver: &Solver, constraints: &[Constraint]) -> Option<Assignment> {
        let result = solver.solve(&self.bias.network(constraints)).ok()?;
        match result.outcome {
            SolveOutcome::Solution { assignment, .. } => Some(assignment),
            _ => None,
        }
    }

    /// Whether `u` together with the confirmed candidates rules out `¬c`.
    pub fn implies(&self, u: &Candidate, c: &Candidate) -> bool {
        if u.entails(c) {
            return true;
        }
        let mut cache = self.implication_cache.borrow_mut();
        if cache.0 != self.confirmed.len() {
            *cache = (self.confirmed.len(), BTreeMap::new());
        }
        if let Some(&known) = cache.1.get(&(*u, *c)) {
            return known;
        }
        let mut constraints = self.hypothesis();
        constraints.push(u.to_constraint());
        constraints.push(c.negated().to_constraint());
        let implied = self.solvable(&Solver::default(), &constraints).is_none();
        cache.1.insert((*u, *c), implied);
        implied
    }

    /// Positive examples reject every candidate they violate. Negative
    /// examples are kept while they satisfy the confirmed set, and a
    /// candidate is confirmed once no hypothesis consistent with the labels
    /// seen so far can omit it (see [`VersionSpace::witness`]). With a
    /// single violated candidate that is the plain near-miss case.
    pub fn update(&mut self, e: &Assignment, positive: bool) -> Result<Update, MlError> {
        if e.len() != self.bias.n_vars {
            return Err(MlError::DimensionMismatch { expected: self.bias.n_vars, found: e.len() });
        }
        let mut update = Update::default();
        if positive {
            if let Some(c) = self.confirmed.iter().find(|c| !c.holds(e)) {
                return Err(MlError::InconsistentOracle(format!("{c}")));
            }
            update.rejected = self.violated(e);
            for c in &update.rejected {
                self.undecided.remove(c);
                self.rejected.insert(*c);
            }
        } else if self.confirmed.iter().all(|c| c.holds(e)) {
            if self.violated(e).is_empty() {
                return Err(MlError::InconsistentOracle(format!("{e:?} labelled negative")));
            }
            self.pending_negatives.push(e.clone());
        }
        self.deduce(&mut update);
        Ok(update)
    }

    fn violated(&self, e: &Assignment) -> Vec<Candidate> {
        self.undecided.iter().filter(|c| !c.holds(e)).copied().collect()
    }

    fn deduce(&mut self, update: &mut Update) {
        let solver = Solver::default();
        loop {
            let before = update.confirmed.len();
            let undecided: Vec<Candidate> = self.undecided.iter().copied().collect();
            for c in undecided {
                if self.witness(&solver, &c).is_none() {
                    self.undecided.remove(&c);
                    self.confirmed.insert(c);
                    update.confirmed.push(c);
                }
            }
            let confirmed = &self.confirmed;
            self.pending_negatives.retain(|n| confirmed.iter().all(|c| c.holds(n)));
            if update.confirmed.len() == before {
                return;
            }
        }
    }

    /// An assignment satisfying the confirmed candidates and violating `c`
    /// such that every pending negative violates some undecided candidate
    /// the assignment satisfies. The undecided candidates it satisfies,
    /// together with the confirmed ones, then form a hypothesis consistent
    /// with every label that omits `c`; when none exists the target must
    /// imply `c`. Returns the posted constraints with the assignment.
    fn witness(&self, solver: &Solver, c: &Candidate) -> Option<(Vec<Constraint>, Assignment)> {
        let clauses: Vec<Vec<Candidate>> = self
            .pending_negatives
            .iter()
            .filter(|n| self.confirmed.iter().all(|k| k.holds(n)))
            .map(|n| self.violated(n))
            .collect();
        let mut constraints = self.hypothesis();
        constraints.push(c.negated().to_constraint());
        let e = self.cover(solver, &clauses, &mut constraints)?;
        Some((constraints, e))
    }

    fn cover(&self, solver: &Solver, clauses: &[Vec<Candidate>], constraints: &mut Vec<Constraint>) -> Option<Assignment> {
        let e = self.solvable(solver, constraints)?;
        let Some(open) = clauses.iter().find(|clause| !clause.iter().any(|v| v.holds(&e))) else {
            // pin the members that cover each clause so callers may extend
            for clause in clauses {
                let hit = clause.iter().find(|v| v.holds(&e)).expect("covered");
                constraints.push(hit.to_constraint());
            }
            return Some(e);
        };
        for v in open {
            constraints.push(v.to_constraint());
            if let Some(e) = self.cover(solver, clauses, constraints) {
                return Some(e);
            }
            constraints.pop();
        }
        None
    }

    /// Picks the next query, trying candidates in order.
    ///
    /// A near-miss for `c` satisfies every confirmed candidate, violates
    /// `c`, and satisfies every other undecided candidate that does not
    /// imply `c`; either label then decides `c`. Undecided candidates can
    /// jointly force each other so that no near-miss exists; the fallback
    /// is a witness for `c`, extended with as many other undecided
    /// candidates as stay satisfiable. A positive label still rejects `c`;
    /// a negative one narrows the hypotheses without always deciding a
    /// candidate at once.
    pub fn generate_query(&self, solver: &Solver) -> Option<Query> {
        self.undecided
            .iter()
            .find_map(|target| self.near_miss(solver, target))
            .or_else(|| self.undecided.iter().find_map(|target| self.relaxed(solver, target)))
    }

    fn near_miss(&self, solver: &Solver, target: &Candidate) -> Option<Query> {
        let mut constraints = self.hypothesis();
        constraints.push(target.negated().to_constraint());
        constraints.extend(
            self.undecided
                .iter()
                .filter(|u| *u != target && !self.implies(u, target))
                .map(Candidate::to_constraint),
        );
        let assignment = self.solvable(solver, &constraints)?;
        Some(Query { target: *target, near_miss: true, constraints, assignment })
    }

    fn relaxed(&self, solver: &Solver, target: &Candidate) -> Option<Query> {
        let (mut constraints, mut assignment) = self.witness(solver, target)?;
        for u in self.undecided.iter().filter(|u| *u != target && !self.implies(u, target)) {
            constraints.push(u.to_constraint());
            match self.solvable(solver, &constraints) {
                Some(a) => assignment = a,
                None => {
                    constraints.pop();
                }
            }
        }
        Some(Query { target: *target, near_miss: false, constraints, assignment })
    }
}

pub fn vs_update(vs: &mut VersionSpace, e: &Assignment, positive: bool) -> Result<Update, MlError> {
    vs.update(e, positive)
}

pub fn vs_generate_query(vs: &VersionSpace, solver: &Solver) -> Option<Query> {
    vs.generate_query(solver)
}
