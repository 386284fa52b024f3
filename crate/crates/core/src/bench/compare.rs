use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{ExperimentReport, Method};
use crate::error::{config, Result};
use crate::stats::{friedman_ranks, holm_adjust, wilcoxon_exact};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub problem: String,
    /// Mean test MAE per method, in `Comparison::methods` order.
    pub mae: Vec<f64>,
    /// Mean compacted rule count per method (rule-based methods only).
    pub rules: Vec<Option<f64>>,
}

/// Table of mean test MAE over problems with Friedman ranks and Wilcoxon
/// tests of each method against a reference method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub methods: Vec<Method>,
    pub reference: Method,
    pub rows: Vec<ComparisonRow>,
    pub avg_ranks: Vec<f64>,
    pub friedman_statistic: f64,
    pub friedman_p: f64,
    /// Wilcoxon p against the reference (`None` for the reference itself or
    /// when the exact test does not apply).
    pub p_values: Vec<Option<f64>>,
    pub p_holm: Vec<Option<f64>>,
}

/// Builds the comparison table from experiments covering every
/// problem × method combination exactly once.
pub fn compare_reports(experiments: &[ExperimentReport], reference: Method) -> Result<Comparison> {
    let mut problems: Vec<String> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for e in experiments {
        if !problems.contains(&e.problem) {
            problems.push(e.problem.clone());
        }
        if !methods.contains(&e.method) {
            methods.push(e.method);
        }
    }
    let Some(ref_idx) = methods.iter().position(|m| *m == reference) else {
        return config(format!("reference method {reference} does not appear in the reports"));
    };
    if methods.len() < 2 || problems.len() < 2 {
        return config("comparison needs at least 2 methods and 2 problems");
    }
    let mut rows = Vec::with_capacity(problems.len());
    for p in &problems {
        let mut mae = Vec::with_capacity(methods.len());
        let mut rules = Vec::with_capacity(methods.len());
        for m in &methods {
            let cell: Vec<&ExperimentReport> = experiments
                .iter()
                .filter(|e| &e.problem == p && e.method == *m)
                .collect();
            let [e] = cell.as_slice() else {
                return config(format!(
                    "expected exactly one experiment for {p} × {m}, found {}",
                    cell.len()
                ));
            };
            let Some(test) = &e.summary.test_mae else {
                return config(format!("{p} × {m} has no successful trials"));
            };
            mae.push(test.mean);
            rules.push(e.summary.rules.as_ref().map(|a| a.mean));
        }
        rows.push(ComparisonRow {
            problem: p.clone(),
            mae,
            rules,
        });
    }
    let table: Vec<Vec<f64>> = rows.iter().map(|r| r.mae.clone()).collect();
    let friedman = friedman_ranks(&table)?;
    let column = |j: usize| -> Vec<f64> { table.iter().map(|r| r[j]).collect() };
    let reference_col = column(ref_idx);
    let p_values: Vec<Option<f64>> = (0..methods.len())
        .map(|j| {
            if j == ref_idx {
                None
            } else {
                wilcoxon_exact(&column(j), &reference_col).ok()
            }
        })
        .collect();
    let tested: Vec<f64> = p_values.iter().flatten().copied().collect();
    let adjusted = holm_adjust(&tested)?;
    let mut it = adjusted.into_iter();
    let p_holm = p_values.iter().map(|p| p.and_then(|_| it.next())).collect();
    Ok(Comparison {
        methods,
        reference,
        rows,
        avg_ranks: friedman.avg_ranks,
        friedman_statistic: friedman.statistic,
        friedman_p: friedman.p_value,
        p_values,
        p_holm,
    })
}

/// Three significant digits, e.g. `0.00781`, `0.0234`, `0.461`.
pub(crate) fn format_p(p: f64) -> String {
    if p <= 0.0 {
        return "0".into();
    }
    let decimals = (2 - p.log10().floor() as i32).max(0) as usize;
    format!("{p:.decimals$}")
}

impl Comparison {
    /// Plain-text table: one row per problem, then rank, p and Holm rows.
    pub fn render(&self) -> String {
        let width = 12;
        let mut out = String::new();
        let _ = write!(out, "{:<14}", "problem");
        for m in &self.methods {
            let _ = write!(out, "{:>width$}", m.id());
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:<14}", r.problem);
            for v in &r.mae {
                let _ = write!(out, "{:>width$.5}", v);
            }
            out.push('\n');
        }
        let mut line = |label: &str, cells: Vec<String>| {
            let _ = write!(out, "{label:<14}");
            for c in cells {
                let _ = write!(out, "{c:>width$}");
            }
            out.push('\n');
        };
        line("rank", self.avg_ranks.iter().map(|r| format!("{r:.2}")).collect());
        let fmt = |p: &Option<f64>| p.map(format_p).unwrap_or_else(|| "-".into());
        line("p-value", self.p_values.iter().map(fmt).collect());
        line("p-holm", self.p_holm.iter().map(fmt).collect());
        let has_rules = self.rows.iter().any(|r| r.rules.iter().any(Option::is_some));
        if has_rules {
            let cells = (0..self.methods.len())
                .map(|j| {
                    let v: Vec<f64> = self.rows.iter().filter_map(|r| r.rules[j]).collect();
                    if v.is_empty() {
                        "-".into()
                    } else {
                        format!("{:.2}", v.iter().sum::<f64>() / v.len() as f64)
                    }
                })
                .collect();
            line("mean rules", cells);
        }
        let _ = writeln!(
            out,
            "friedman chi2 = {:.4}, p = {} (reference: {})",
            self.friedman_statistic,
            format_p(self.friedman_p),
            self.reference
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(0.0078125), "0.00781");
        assert_eq!(format_p(0.0234375), "0.0234");
        assert_eq!(format_p(0.461), "0.461");
        assert_eq!(format_p(1.0), "1.00");
    }
}
