//! Benchmark-table analytics: row averages, relative deltas and grouped
//! deltas against a base checkpoint.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkRow {
    pub tokens: u64,
    pub scores: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkTable {
    pub rows: IndexMap<String, BenchmarkRow>,
    #[serde(default = "default_groups")]
    pub groups: IndexMap<String, Vec<String>>,
    pub base: String,
}

pub fn default_groups() -> IndexMap<String, Vec<String>> {
    let mut g = IndexMap::new();
    g.insert(
        "educational".to_string(),
        ["MMLU", "ARC-Challenge", "ARC-Easy", "HellaSwag"].map(String::from).to_vec(),
    );
    g.insert(
        "general".to_string(),
        ["Winogrande", "BoolQ", "PIQA"].map(String::from).to_vec(),
    );
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Relative change of the group's mean score.
    RatioOfMeans,
    /// Mean of the per-benchmark relative changes.
    MeanOfRatios,
}

impl Aggregation {
    pub const ALL: [Aggregation; 2] = [Aggregation::RatioOfMeans, Aggregation::MeanOfRatios];

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::RatioOfMeans => "ratio_of_means",
            Aggregation::MeanOfRatios => "mean_of_ratios",
        }
    }
}

impl BenchmarkTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: BenchmarkTable =
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        let base = self
            .rows
            .get(&self.base)
            .ok_or_else(|| Error::Invalid(format!("base row {:?} not in table", self.base)))?;
        let mut names: Vec<&String> = base.scores.keys().collect();
        names.sort();
        if names.is_empty() {
            return Err(Error::Invalid("base row has no scores".into()));
        }
        for (label, row) in &self.rows {
            let mut other: Vec<&String> = row.scores.keys().collect();
            other.sort();
            if other != names {
                return Err(Error::Invalid(format!("row {label:?} has a different benchmark set")));
            }
            if let Some((name, s)) = row.scores.iter().find(|(_, s)| !(0.0..=1.0).contains(*s)) {
                return Err(Error::Invalid(format!("row {label:?}: {name} score {s} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Benchmark names in the base row's order.
    pub fn benchmarks(&self) -> Vec<&str> {
        self.rows[&self.base].scores.keys().map(String::as_str).collect()
    }

    /// Rows ordered by token volume, ties broken by label.
    pub fn ordered_rows(&self) -> Vec<(&str, &BenchmarkRow)> {
        let mut rows: Vec<_> = self.rows.iter().map(|(l, r)| (l.as_str(), r)).collect();
        rows.sort_by(|a, b| a.1.tokens.cmp(&b.1.tokens).then(a.0.cmp(b.0)));
        rows
    }

    pub fn row_average(&self, label: &str) -> Result<f64> {
        let row = self.row(label)?;
        table_average(&row.scores.values().copied().collect::<Vec<_>>())
    }

    fn row(&self, label: &str) -> Result<&BenchmarkRow> {
        self.rows
            .get(label)
            .ok_or_else(|| Error::Invalid(format!("no row {label:?}")))
    }
}

pub fn table_average(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Invalid("cannot average an empty score set".into()));
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Percent change from `base` to `new`.
pub fn relative_delta(base: f64, new: f64) -> Result<f64> {
    if !(base > 0.0) {
        return Err(Error::Invalid(format!("relative delta needs base > 0, got {base}")));
    }
    Ok(100.0 * (new - base) / base)
}

/// group → row label → percent delta against the base row, rows in token order.
pub type GroupDeltas = IndexMap<String, IndexMap<String, f64>>;

pub fn group_deltas(table: &BenchmarkTable, method: Aggregation) -> Result<GroupDeltas> {
    let base = table.row(&table.base)?;
    let mut out = IndexMap::new();
    for (group, members) in &table.groups {
        if members.is_empty() {
            return Err(Error::Invalid(format!("group {group:?} is empty")));
        }
        for m in members {
            if !base.scores.contains_key(m) {
                return Err(Error::Invalid(format!("group {group:?} names unknown benchmark {m:?}")));
            }
        }
        let mut per_row = IndexMap::new();
        for (label, row) in table.ordered_rows() {
            let delta = match method {
                Aggregation::RatioOfMeans => {
                    let mean = |r: &BenchmarkRow| members.iter().map(|m| r.scores[m]).sum::<f64>() / members.len() as f64;
                    relative_delta(mean(base), mean(row))?
                }
                Aggregation::MeanOfRatios => {
                    let deltas = members
                        .iter()
                        .map(|m| relative_delta(base.scores[m], row.scores[m]))
                        .collect::<Result<Vec<_>>>()?;
                    deltas.iter().sum::<f64>() / deltas.len() as f64
                }
            };
            per_row.insert(label.to_string(), delta);
        }
        out.insert(group.clone(), per_row);
    }
    Ok(out)
}
