use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::antecedent::Antecedent;

/// Antecedent, consequent and bookkeeping of one macro-rule.
///
/// The antecedent, consequent, error and accuracy are fixed at creation;
/// fitness, numerosity and timestamp change during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule<M> {
    id: u64,
    antecedent: Antecedent,
    consequent: M,
    error: f64,
    accuracy: f64,
    pub(crate) numerosity: u32,
    pub(crate) timestamp: u64,
    pub(crate) fitness: f64,
}

impl<M> Rule<M> {
    /// `id` is the creation index used for age-based tie-breaking.
    pub fn new(
        id: u64,
        antecedent: Antecedent,
        consequent: M,
        error: f64,
        accuracy: f64,
        fitness: f64,
    ) -> Self {
        Self {
            id,
            antecedent,
            consequent,
            error,
            accuracy,
            numerosity: 1,
            timestamp: 0,
            fitness,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn antecedent(&self) -> &Antecedent {
        &self.antecedent
    }

    pub fn consequent(&self) -> &M {
        &self.consequent
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn numerosity(&self) -> u32 {
        self.numerosity
    }

    pub fn timestamp(&self) -> u64 {
        self.timestamp
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    pub fn set_fitness(&mut self, f: f64) {
        self.fitness = f;
    }

    pub fn set_numerosity(&mut self, num: u32) {
        self.numerosity = num;
    }

    pub fn set_timestamp(&mut self, ts: u64) {
        self.timestamp = ts;
    }

    pub(crate) fn offspring(&self, id: u64, fitness: f64) -> Self
    where
        M: Clone,
    {
        Self {
            id,
            numerosity: 1,
            fitness,
            ..self.clone()
        }
    }

    /// Winner ordering: higher fitness, then lower error, then older.
    /// `Ordering::Greater` means `self` wins.
    pub fn compare_strength(&self, other: &Self) -> Ordering {
        self.fitness
            .total_cmp(&other.fitness)
            .then_with(|| other.error.total_cmp(&self.error))
            .then_with(|| other.id.cmp(&self.id))
    }
}
