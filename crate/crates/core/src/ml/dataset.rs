use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MlError;

/// `N` feature rows of equal width `M`, each with a real target.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: usize,
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    /// Empty dataset of the given width.
    pub fn empty(features: usize) -> Self {
        Dataset { features, rows: Vec::new(), targets: Vec::new() }
    }

    /// Rows must share one width; an empty row list yields width 0.
    pub fn new(rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, MlError> {
        let features = rows.first().map_or(0, Vec::len);
        let mut d = Dataset::empty(features);
        if rows.len() != targets.len() {
            return Err(MlError::DimensionMismatch { expected: rows.len(), found: targets.len() });
        }
        for (row, y) in rows.into_iter().zip(targets) {
            d.push(row, y)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, row: Vec<f64>, target: f64) -> Result<(), MlError> {
        if row.len() != self.features {
            return Err(MlError::RaggedRow { row: self.rows.len(), expected: self.features, found: row.len() });
        }
        self.rows.push(row);
        self.targets.push(target);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.rows.iter().map(Vec::as_slice).zip(self.targets.iter().copied())
    }
}
