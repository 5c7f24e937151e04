//! Per-seed trace CSV files and the summary JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// One CSV row. `t` counts from 1; payoffs are raw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub action_id: usize,
    pub adversary_id: usize,
    pub payoff: f64,
    pub cum_payoff: f64,
    pub best_in_hindsight_cum: f64,
    pub cum_regret: f64,
}

pub const TRACE_COLUMNS: [&str; 7] = [
    "t",
    "action_id",
    "adversary_id",
    "payoff",
    "cum_payoff",
    "best_in_hindsight_cum",
    "cum_regret",
];

pub fn trace_file_name(horizon: usize, seed: u64) -> String {
    format!("trace_T{horizon}_seed{seed}.csv")
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let csv_err = |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != TRACE_COLUMNS {
        return Err(HarnessError::Input(format!(
            "{}: unexpected columns {header:?}",
            path.display()
        )));
    }
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)
}

/// Summary quantities recoverable from a trace alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replay {
    pub regret: f64,
    pub c_regret: f64,
    pub switch_fraction: f64,
}

pub fn replay(rows: &[TraceRow], c: f64) -> Result<Replay> {
    let last = rows
        .last()
        .ok_or_else(|| HarnessError::Input("empty trace".into()))?;
    Ok(Replay {
        regret: last.best_in_hindsight_cum - last.cum_payoff,
        c_regret: c * last.best_in_hindsight_cum - last.cum_payoff,
        switch_fraction: switch_fraction(rows.iter().map(|r| r.action_id)),
    })
}

/// Fraction of rounds `t ≥ 2` whose action differs from round `t − 1`, over `T`.
pub fn switch_fraction(actions: impl Iterator<Item = usize>) -> f64 {
    let mut prev = None;
    let (mut rounds, mut switches) = (0usize, 0usize);
    for a in actions {
        switches += usize::from(prev.is_some_and(|p| p != a));
        prev = Some(a);
        rounds += 1;
    }
    if rounds == 0 {
        0.0
    } else {
        switches as f64 / rounds as f64
    }
}

/// Per-seed record. All payoff quantities are raw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub regret: f64,
    pub c_regret: f64,
    pub stability_term: f64,
    pub perturbation_term: f64,
    pub epsilon_term: f64,
    pub switch_fraction: f64,
    pub bound: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    pub horizon: usize,
    pub mean_regret: f64,
    pub runs: Vec<SummaryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub environment: String,
    pub algorithm: String,
    pub c: f64,
    pub horizons: Vec<HorizonSummary>,
    /// Mean regret at the last horizon over mean regret at the first; set for sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regret_ratio: Option<f64>,
}

impl Summary {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
