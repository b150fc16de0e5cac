//! Per-cycle metrics, one JSON object per line.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics {
    pub cycle: u64,
    /// `applied`, `converged` or `failed`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub applied: bool,
    pub converged: bool,
    pub retries: u32,
    pub nodes: u64,
    pub learner_loss: Option<f64>,
    /// Hospital: mean absolute duration-prediction error on the tasks
    /// executed this cycle.
    pub prediction_mae: Option<f64>,
    pub objective: Option<i64>,
    pub makespan: Option<i64>,
    pub violations: Option<u64>,
    /// Acquisition: candidates still undecided after this cycle.
    pub undecided: Option<usize>,
    /// Acquisition: examples so far that changed the version space.
    pub informative: Option<usize>,
}

pub fn write_metrics(records: &[CycleMetrics], mut out: impl Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_metrics(input: impl BufRead) -> io::Result<Vec<CycleMetrics>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(io::Error::other)?);
    }
    Ok(records)
}
