//! Regression datasets as CSV: a header `f1,...,fM,target`, then one numeric
//! row per example.

use icp_core::ml::Dataset;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("dataset is empty")]
    Empty,
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("line {line}: `{cell}` is not a number")]
    NotNumeric { line: u64, cell: String },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let width = reader
        .headers()
        .map_err(|e| DatasetError::Csv { line: 1, message: e.to_string() })?
        .len();
    if width == 0 || text.trim().is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DatasetError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(DatasetError::Ragged { line, expected: width, found: record.len() });
        }
        let values = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| DatasetError::NotNumeric { line, cell: cell.to_string() })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let (x, y) = values.split_at(width - 1);
        rows.push(x.to_vec());
        targets.push(y[0]);
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }
    Dataset::new(rows, targets).map_err(|e| DatasetError::Csv { line: 0, message: e.to_string() })
}
