use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::MlError;
use crate::cp::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisSpace {
    LinearRegression,
    VersionSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    SquaredError,
    Misclassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Examples {
    Regression(Dataset),
    /// Assignments with their labels, in arrival order.
    Classified(Vec<(Assignment, bool)>),
}

/// Examples, hypothesis space and loss handed to a learner, plus any
/// failure notice forwarded from the solver side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningProblem {
    pub examples: Examples,
    pub hypothesis_space: HypothesisSpace,
    pub loss: LossKind,
    pub solver_feedback: Option<String>,
}

impl LearningProblem {
    pub fn new(examples: Examples, hypothesis_space: HypothesisSpace, loss: LossKind) -> Result<Self, MlError> {
        let compatible = matches!(
            (&examples, hypothesis_space, loss),
            (Examples::Regression(_), HypothesisSpace::LinearRegression, LossKind::SquaredError)
                | (Examples::Classified(_), HypothesisSpace::VersionSpace, LossKind::Misclassification)
        );
        if !compatible {
            return Err(MlError::IncompatibleProblem);
        }
        Ok(LearningProblem { examples, hypothesis_space, loss, solver_feedback: None })
    }

    pub fn regression(data: Dataset) -> Self {
        Self::new(Examples::Regression(data), HypothesisSpace::LinearRegression, LossKind::SquaredError)
            .expect("compatible by construction")
    }

    pub fn acquisition(examples: Vec<(Assignment, bool)>) -> Self {
        Self::new(Examples::Classified(examples), HypothesisSpace::VersionSpace, LossKind::Misclassification)
            .expect("compatible by construction")
    }
}
