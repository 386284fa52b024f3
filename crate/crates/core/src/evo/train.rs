use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::EvoParams;
use super::population::Population;
use crate::data::Dataset;
use crate::error::{input, Result};
use crate::model::ModelFactory;

/// Points in the training loop at which an observer is notified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainEvent {
    /// A covering rule was inserted (and excess numerosity deleted).
    Covered,
    /// The genetic algorithm ran, including subsumption and deletion.
    Evolved,
    /// One data point was fully processed.
    Iteration,
}

/// Trains a rule population for `params.epochs` shuffled passes over `data`.
/// The result is not compacted.
pub fn train_ruleset<F: ModelFactory>(
    data: &Dataset,
    params: &EvoParams,
    factory: &F,
    seed: u64,
) -> Result<Population<F::Model>> {
    train_ruleset_observed(data, params, factory, seed, &mut |_, _| {})
}

pub fn train_ruleset_observed<F: ModelFactory>(
    data: &Dataset,
    params: &EvoParams,
    factory: &F,
    seed: u64,
    observer: &mut dyn FnMut(TrainEvent, &Population<F::Model>),
) -> Result<Population<F::Model>> {
    params.validate()?;
    if data.is_empty() {
        return input("training data is empty");
    }
    let mut pop = Population::new(params.clone(), seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut t: u64 = 0;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            pop.set_iteration(t);
            let x = data.row(i);
            let mut matched = pop.match_set(x);
            if matched.is_empty() {
                let rule = pop.cover_rule(x, data, factory, &mut rng)?;
                pop.push(rule);
                pop.delete_excess(&mut rng);
                observer(TrainEvent::Covered, &pop);
                matched = pop.match_set(x);
            }
            if !matched.is_empty() {
                pop.update_fitness(&matched);
                if pop.ea_due(&matched, t) {
                    for &k in &matched {
                        pop.rules_mut()[k].set_timestamp(t);
                    }
                    pop.run_ea(&matched, data, factory, &mut rng, t)?;
                    observer(TrainEvent::Evolved, &pop);
                }
            }
            observer(TrainEvent::Iteration, &pop);
            t += 1;
        }
    }
    pop.set_iteration(t);
    Ok(pop)
}
