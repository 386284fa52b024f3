use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// How fitness is assigned in the match set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitnessMode {
    /// Widrow-Hoff update toward the numerosity-weighted accuracy share.
    #[default]
    Full,
    /// Fitness equals accuracy; no generality pressure.
    AccuracyOnly,
}

/// How crossover exchanges interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverMode {
    /// Swap the `(l_i, u_i)` pair of a dimension as a unit.
    #[default]
    PairSwap,
    /// Swap `l_i` and `u_i` independently, then repair inverted intervals.
    IndependentBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvoParams {
    /// Maximum covering spread.
    pub r0: f64,
    /// Don't Care probability during covering.
    pub p_hash: f64,
    /// Target error.
    pub eps0: f64,
    /// Fitness learning rate.
    pub beta: f64,
    pub theta_ea: f64,
    /// Tournament size as a fraction of the match set.
    pub tau: f64,
    pub chi: f64,
    pub mu: f64,
    pub m0: f64,
    /// Budget on total numerosity.
    pub n: usize,
    /// Passes over the training data.
    pub epochs: usize,
    pub fitness_mode: FitnessMode,
    pub crossover_mode: CrossoverMode,
}

impl Default for EvoParams {
    fn default() -> Self {
        Self {
            r0: 1.0,
            p_hash: 0.0,
            eps0: 0.02,
            beta: 0.2,
            theta_ea: 100.0,
            tau: 0.4,
            chi: 0.8,
            mu: 0.04,
            m0: 0.1,
            n: 50,
            epochs: 10,
            fitness_mode: FitnessMode::Full,
            crossover_mode: CrossoverMode::PairSwap,
        }
    }
}

impl EvoParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(self.r0 > 0.0 && self.r0 <= 1.0) {
            return config(format!("r0 must lie in (0, 1], got {}", self.r0));
        }
        if !unit(self.p_hash) || !unit(self.beta) || !unit(self.chi) || !unit(self.mu) {
            return config("p_hash, beta, chi and mu must lie in [0, 1]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return config(format!("tau must lie in (0, 1], got {}", self.tau));
        }
        if !(self.eps0 > 0.0) || !(self.m0 > 0.0) || !(self.theta_ea >= 0.0) {
            return config("eps0 and m0 must be positive, theta_ea non-negative");
        }
        if self.n == 0 || self.epochs == 0 {
            return config("N and epochs must be >= 1");
        }
        Ok(())
    }
}
