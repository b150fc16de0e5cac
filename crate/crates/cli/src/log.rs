//! Repository log: every record of the three repositories, one JSON object
//! per line as `{"repo": ..., "cycle": ..., "payload": ...}`.
//!
//! Observations come first, then patterns, then solutions, each in append
//! order. `repo` is `observations`, `patterns` or `solutions`.

use std::io::{self, BufRead, Write};

use icp_core::icp::{LoopState, Record};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub repo: String,
    pub cycle: u64,
    pub payload: Value,
}

fn records<T: Serialize>(repo: &str, items: &[Record<T>]) -> io::Result<Vec<LogRecord>> {
    items
        .iter()
        .map(|r| {
            let payload = serde_json::to_value(&r.item).map_err(io::Error::other)?;
            Ok(LogRecord { repo: repo.to_string(), cycle: r.cycle, payload })
        })
        .collect()
}

pub fn log_records<O: Serialize, S: Serialize>(state: &LoopState<O, S>) -> io::Result<Vec<LogRecord>> {
    let mut out = records("observations", state.observations.records())?;
    out.extend(records("patterns", state.patterns.records())?);
    out.extend(records("solutions", state.solutions.records())?);
    Ok(out)
}

pub fn write_log<O: Serialize, S: Serialize>(state: &LoopState<O, S>, mut out: impl Write) -> io::Result<()> {
    for r in log_records(state)? {
        serde_json::to_writer(&mut out, &r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_log(input: impl BufRead) -> io::Result<Vec<LogRecord>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(io::Error::other))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use icp_core::icp::LoopState;

    #[test]
    fn log_round_trips() {
        let mut state: LoopState<u32, String> = LoopState::new(0);
        state.observations.append(0, 7);
        state.observations.append(1, 8);
        let mut buf = Vec::new();
        write_log(&state, &mut buf).unwrap();
        let back = read_log(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1], LogRecord { repo: "observations".into(), cycle: 1, payload: Value::from(8) });
    }
}
