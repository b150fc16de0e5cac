//! The learning side: least-squares regression and version-space
//! constraint acquisition.

use alloc::string::String;

use thiserror::Error;

mod dataset;
mod linear;
mod problem;
mod version_space;

pub use dataset::Dataset;
pub use linear::{fit_linear, fit_linear_default, gradient, loss, predict, LinearHypothesis, FALLBACK_RIDGE};
pub use problem::{Examples, HypothesisSpace, LearningProblem, LossKind};
pub use version_space::{
    vs_generate_query, vs_init, vs_update, Candidate, ConstraintBias, Query, Relation, Update,
    VersionSpace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MlError {
    #[error("cannot fit an empty dataset")]
    EmptyDataset,
    #[error("normal equations are singular; pass a ridge > 0")]
    Singular,
    #[error("ridge must be non-negative")]
    NegativeRidge,
    #[error("expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row} has {found} features, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("constraint bias is empty")]
    EmptyBias,
    #[error("candidate {0} is outside the acquisition variables")]
    BadCandidate(String),
    #[error("oracle labelled a violation of confirmed constraint {0} as positive")]
    InconsistentOracle(String),
    #[error("loss kind does not fit the hypothesis space")]
    IncompatibleProblem,
}
