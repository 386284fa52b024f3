use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// Minimum interval width restored when mutation collapses an interval.
pub(crate) const MIN_WIDTH: f64 = 1e-3;

/// Hyperrectangle `[l_1, u_1] x ... x [l_n, u_n]` inside `[0, 1]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Antecedent {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Antecedent {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let a = Self { lower, upper };
        a.validate()?;
        Ok(a)
    }

    /// The whole unit cube.
    pub fn full(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return input("antecedent bounds must be non-empty and of equal length");
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if !(0.0 <= *l && l < u && *u <= 1.0) {
                return input(format!("invalid interval [{l}, {u}]"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Inclusive containment.
    #[inline]
    pub fn matches(&self, x: &[f64]) -> bool {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(x)
            .all(|((l, u), v)| l <= v && v <= u)
    }

    /// `self ⊇ other`.
    pub fn contains(&self, other: &Antecedent) -> bool {
        self.lower
            .iter()
            .zip(&other.lower)
            .all(|(a, b)| a <= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| b <= a)
    }

    /// Chebyshev distance from `x` to the box; zero inside.
    pub fn linf_distance(&self, x: &[f64]) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(x)
            .map(|((l, u), v)| (l - v).max(v - u).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Builds a covering box around `x`.
    pub(crate) fn cover(x: &[f64], r0: f64, p_hash: f64, rng: &mut impl Rng) -> Self {
        let mut lower = Vec::with_capacity(x.len());
        let mut upper = Vec::with_capacity(x.len());
        for &v in x {
            if rng.random::<f64>() < p_hash {
                lower.push(0.0);
                upper.push(1.0);
            } else {
                // U(0, r0] via 1 - U[0, 1).
                let dl = r0 * (1.0 - rng.random::<f64>());
                let du = r0 * (1.0 - rng.random::<f64>());
                lower.push((v - dl).clamp(0.0, 1.0));
                upper.push((v + du).clamp(0.0, 1.0));
            }
        }
        Self { lower, upper }
    }

    pub(crate) fn swap_pair(&mut self, other: &mut Antecedent, i: usize) {
        std::mem::swap(&mut self.lower[i], &mut other.lower[i]);
        std::mem::swap(&mut self.upper[i], &mut other.upper[i]);
    }

    pub(crate) fn swap_lower(&mut self, other: &mut Antecedent, i: usize) {
        std::mem::swap(&mut self.lower[i], &mut other.lower[i]);
    }

    pub(crate) fn swap_upper(&mut self, other: &mut Antecedent, i: usize) {
        std::mem::swap(&mut self.upper[i], &mut other.upper[i]);
    }

    pub(crate) fn shift(&mut self, i: usize, dl: f64, du: f64) {
        self.lower[i] += dl;
        self.upper[i] += du;
        self.repair(i);
    }

    /// Clamps to `[0, 1]`, uninverts, and widens collapsed intervals.
    pub(crate) fn repair(&mut self, i: usize) {
        let (mut l, mut u) = (self.lower[i].clamp(0.0, 1.0), self.upper[i].clamp(0.0, 1.0));
        if l > u {
            std::mem::swap(&mut l, &mut u);
        }
        if l >= u {
            l = (l - MIN_WIDTH / 2.0).max(0.0);
            u = (u + MIN_WIDTH / 2.0).min(1.0);
        }
        self.lower[i] = l;
        self.upper[i] = u;
    }
}
