//! Exact Wilcoxon signed-rank test, Friedman average ranks and Holm's
//! step-down correction.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{input, Result};

/// Largest number of non-zero differences handled by exact enumeration.
pub const WILCOXON_MAX_PAIRS: usize = 20;

/// Mid-ranks (1-based) of `values` in ascending order.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided exact p-value of the Wilcoxon signed-rank test on paired
/// samples. Zero differences are dropped and tied magnitudes mid-ranked.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return input(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let m = diffs.len();
    if !(2..=WILCOXON_MAX_PAIRS).contains(&m) {
        return input(format!(
            "exact Wilcoxon test needs 2..={WILCOXON_MAX_PAIRS} non-zero differences, got {m}; \
             collect more paired results or use an approximate test"
        ));
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    // Mid-ranks are multiples of 1/2, so doubled ranks are integers.
    let doubled: Vec<usize> = mid_ranks(&magnitudes)
        .iter()
        .map(|r| (2.0 * r).round() as usize)
        .collect();
    let total: usize = doubled.iter().sum();
    let observed: usize = doubled
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();

    // counts[s] = number of sign assignments whose positive doubled-rank sum is s
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let deviation = |s: usize| (2 * s).abs_diff(total);
    let threshold = deviation(observed);
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| deviation(*s) >= threshold)
        .map(|(_, c)| c)
        .sum();
    Ok((extreme as f64 / (1u64 << m) as f64).min(1.0))
}

/// Result of a Friedman test over a problems × methods score table.
#[derive(Debug, Clone, PartialEq)]
pub struct Friedman {
    /// Average rank per method (rank 1 = lowest score).
    pub avg_ranks: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
}

pub fn friedman_ranks(table: &[Vec<f64>]) -> Result<Friedman> {
    let n = table.len();
    if n < 2 {
        return input("Friedman test needs at least 2 problems");
    }
    let k = table[0].len();
    if k < 2 {
        return input("Friedman test needs at least 2 methods");
    }
    if table.iter().any(|row| row.len() != k) {
        return input("score table rows differ in length");
    }
    let mut avg = vec![0.0; k];
    for row in table {
        for (a, r) in avg.iter_mut().zip(mid_ranks(row)) {
            *a += r;
        }
    }
    for a in &mut avg {
        *a /= n as f64;
    }
    let (nf, kf) = (n as f64, k as f64);
    let statistic = 12.0 * nf / (kf * (kf + 1.0)) * avg.iter().map(|r| r * r).sum::<f64>()
        - 3.0 * nf * (kf + 1.0);
    let chi2 = ChiSquared::new(kf - 1.0).expect("positive degrees of freedom");
    let p_value = (1.0 - chi2.cdf(statistic.max(0.0))).clamp(0.0, 1.0);
    Ok(Friedman {
        avg_ranks: avg,
        statistic,
        p_value,
    })
}

/// Holm step-down adjustment, returned in the input order.
pub fn holm_adjust(pvals: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return input(format!("p-value {p} outside [0, 1]"));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let mut out = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (i, &k) in order.iter().enumerate() {
        running = running.max(pvals[k] * (m - i) as f64).min(1.0);
        out[k] = running;
    }
    Ok(out)
}
