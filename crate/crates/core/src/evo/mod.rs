//! Michigan-style evolutionary rule learning with trained local consequents.
//!
//! Each rule pairs a hyperrectangular antecedent with a consequent model fitted
//! on the training points it covers. The population evolves through covering,
//! a niche genetic algorithm with subsumption, and numerosity-based deletion;
//! after training it is compacted to the single-winner rules and queried with
//! single-winner inference.

mod antecedent;
mod params;
mod population;
mod rule;
mod train;

pub use antecedent::Antecedent;
pub use params::{CrossoverMode, EvoParams, FitnessMode};
pub use population::{rule_accuracy, rule_error, subsumes, Population};
pub use rule::Rule;
pub use train::{train_ruleset, train_ruleset_observed, TrainEvent};
