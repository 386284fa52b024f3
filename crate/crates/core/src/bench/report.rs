use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Method};
use crate::error::Result;

/// Outcome of one Monte Carlo trial. Metrics are on normalized targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub train_mae: Option<f64>,
    pub test_mae: Option<f64>,
    /// Rules in the compacted set (rule-based methods only).
    pub rules: Option<usize>,
    /// Macro-rules before compaction.
    pub uncompacted_rules: Option<usize>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (0 for a single value).
    pub std: f64,
}

impl Aggregates {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 0 {
            0.5 * (sorted[mid - 1] + sorted[mid])
        } else {
            sorted[mid]
        };
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, median, std })
    }
}

/// Aggregates over the successful trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub completed: usize,
    pub failed: usize,
    pub train_mae: Option<Aggregates>,
    pub test_mae: Option<Aggregates>,
    pub rules: Option<Aggregates>,
}

impl Summary {
    pub fn of(records: &[TrialRecord]) -> Self {
        let collect = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> {
            records.iter().filter_map(f).collect()
        };
        let ok = records.iter().filter(|r| r.error.is_none()).count();
        Self {
            completed: ok,
            failed: records.len() - ok,
            train_mae: Aggregates::of(&collect(&|r| r.train_mae)),
            test_mae: Aggregates::of(&collect(&|r| r.test_mae)),
            rules: Aggregates::of(&collect(&|r| r.rules.map(|c| c as f64))),
        }
    }
}

/// All trials of one problem × method cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub problem: String,
    pub method: Method,
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, records: Vec<TrialRecord>) -> Self {
        Self {
            problem: config.problem.id(),
            method: config.method,
            summary: Summary::of(&records),
            config,
            records,
        }
    }

    pub fn test_maes(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.test_mae).collect()
    }

    pub fn rule_counts(&self) -> Vec<usize> {
        self.records.iter().filter_map(|r| r.rules).collect()
    }
}

/// A set of experiments, as written by one benchmark invocation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub experiments: Vec<ExperimentReport>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    problem: &'a str,
    method: &'a str,
    trial: usize,
    seed: u64,
    train_mae: Option<f64>,
    test_mae: Option<f64>,
    rules: Option<usize>,
    uncompacted_rules: Option<usize>,
    wall_time_s: f64,
    error: Option<&'a str>,
}

impl BenchmarkReport {
    /// Copy with every timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.experiments {
            for r in &mut e.records {
                r.wall_time_s = 0.0;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// One flat row per trial.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.experiments {
            for r in &e.records {
                w.serialize(CsvRow {
                    problem: &e.problem,
                    method: e.method.id(),
                    trial: r.trial,
                    seed: r.seed,
                    train_mae: r.train_mae,
                    test_mae: r.test_mae,
                    rules: r.rules,
                    uncompacted_rules: r.uncompacted_rules,
                    wall_time_s: r.wall_time_s,
                    error: r.error.as_deref(),
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
