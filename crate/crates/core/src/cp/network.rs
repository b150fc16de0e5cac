use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::domain::Domain;

/// Largest domain (number of values) a variable may declare.
pub const MAX_DOMAIN_SPAN: i64 = 1 << 20;

/// Dense index of a variable inside its [`ConstraintNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// `Σ coeff·var (op) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linear {
    pub terms: Vec<(i64, VarId)>,
    pub rhs: i64,
}

impl Linear {
    pub fn new(terms: Vec<(i64, VarId)>, rhs: i64) -> Self {
        Linear { terms, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulativeTask {
    pub start: VarId,
    pub duration: i64,
    pub demand: i64,
}

/// At every time point the summed demand of running tasks stays within
/// `capacity`. A task runs over `[start, start + duration)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cumulative {
    pub tasks: Vec<CumulativeTask>,
    pub capacity: i64,
}

/// `after ≥ before + duration + gap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precedence {
    pub before: VarId,
    pub after: VarId,
    pub duration: i64,
    pub gap: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    AllDifferent(Vec<VarId>),
    Cumulative(Cumulative),
    LinearEq(Linear),
    LinearLe(Linear),
    Precedence(Precedence),
    EqConst(VarId, i64),
}

impl Constraint {
    /// Variables in the scope, in declaration order (may repeat).
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            Constraint::AllDifferent(vars) => vars.clone(),
            Constraint::Cumulative(c) => c.tasks.iter().map(|t| t.start).collect(),
            Constraint::LinearEq(l) | Constraint::LinearLe(l) => {
                l.terms.iter().map(|&(_, v)| v).collect()
            }
            Constraint::Precedence(p) => alloc::vec![p.before, p.after],
            Constraint::EqConst(v, _) => alloc::vec![*v],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("constraint {constraint} references undeclared variable {var}")]
    UndefinedVariable { constraint: usize, var: VarId },
    #[error("objective references undeclared variable {0}")]
    UndefinedObjective(VarId),
    #[error("variable {0} has an empty domain")]
    EmptyDomain(VarId),
    #[error("variable {0} declares more than {MAX_DOMAIN_SPAN} values")]
    DomainTooLarge(VarId),
    #[error("objective variable {0} has an unbounded domain")]
    UnboundedObjective(VarId),
    #[error("constraint {0} has a negative duration, demand or capacity")]
    NegativeParameter(usize),
    #[error("network has no objective to minimize")]
    NoObjective,
    #[error("assignment has {found} values, network has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
}

/// Variables with integer range domains, constraints over them, and an
/// optional variable to minimize.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintNetwork {
    names: Vec<String>,
    bounds: Vec<(i64, i64)>,
    constraints: Vec<Constraint>,
    objective: Option<VarId>,
}

impl ConstraintNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable ranging over `lo..=hi`.
    pub fn add_var(&mut self, name: impl Into<String>, lo: i64, hi: i64) -> VarId {
        self.names.push(name.into());
        self.bounds.push((lo, hi));
        VarId(self.names.len() - 1)
    }

    pub fn post(&mut self, constraint: Constraint) {
        self.constraints.push(constraint);
    }

    pub fn set_objective(&mut self, var: VarId) {
        self.objective = Some(var);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.names.len()).map(VarId)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.names[var.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(VarId)
    }

    pub fn bounds(&self, var: VarId) -> (i64, i64) {
        self.bounds[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<VarId> {
        self.objective
    }

    /// Checks references, domain sizes and constraint parameters.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let n = self.num_vars();
        if let Some(obj) = self.objective {
            if obj.0 >= n {
                return Err(NetworkError::UndefinedObjective(obj));
            }
            let (lo, hi) = self.bounds[obj.0];
            if i128::from(hi) - i128::from(lo) + 1 > i128::from(MAX_DOMAIN_SPAN) {
                return Err(NetworkError::UnboundedObjective(obj));
            }
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo > hi {
                return Err(NetworkError::EmptyDomain(VarId(i)));
            }
            if i128::from(hi) - i128::from(lo) + 1 > i128::from(MAX_DOMAIN_SPAN) {
                return Err(NetworkError::DomainTooLarge(VarId(i)));
            }
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            if let Some(&var) = c.scope().iter().find(|v| v.0 >= n) {
                return Err(NetworkError::UndefinedVariable { constraint: ci, var });
            }
            let negative = match c {
                Constraint::Cumulative(cu) => {
                    cu.capacity < 0 || cu.tasks.iter().any(|t| t.duration < 0 || t.demand < 0)
                }
                Constraint::Precedence(p) => p.duration < 0,
                _ => false,
            };
            if negative {
                return Err(NetworkError::NegativeParameter(ci));
            }
        }
        Ok(())
    }

    /// Fresh domains from the declared bounds.
    pub fn initial_domains(&self) -> Result<Vec<Domain>, NetworkError> {
        self.validate()?;
        Ok(self.bounds.iter().map(|&(lo, hi)| Domain::range(lo, hi)).collect())
    }
}

/// One value per network variable, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<i64>);

impl Assignment {
    pub fn new(values: Vec<i64>) -> Self {
        Assignment(values)
    }

    pub fn get(&self, var: VarId) -> i64 {
        self.0[var.0]
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
