use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::antecedent::Antecedent;
use super::params::{CrossoverMode, EvoParams, FitnessMode};
use super::rule::Rule;
use crate::data::Dataset;
use crate::error::{input, Error, Result};
use crate::model::{ModelFactory, Regressor};

/// Initial fitness of a covering rule.
pub const COVER_FITNESS: f64 = 0.01;
/// Offspring fitness is this fraction of the inherited fitness.
pub const OFFSPRING_FITNESS_SCALE: f64 = 0.1;
/// Deletion votes are multiplied by this factor for low-fitness rules.
const LOW_FITNESS_VOTE: f64 = 3.0;
/// Rules whose per-micro-rule fitness is below this fraction of the
/// population average are considered low-fitness.
const LOW_FITNESS_RATIO: f64 = 0.1;

/// Mean absolute error of `model` on a rule's data subset.
pub fn rule_error<M: Regressor>(model: &M, xs: &[&[f64]], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return input("rule covers no data points");
    }
    let preds = model.predict_many(xs);
    Ok(preds
        .iter()
        .zip(ys)
        .map(|(p, y)| (y - p).abs())
        .sum::<f64>()
        / xs.len() as f64)
}

/// `1` below the target error, `eps0 / eps` above it.
pub fn rule_accuracy(error: f64, eps0: f64) -> f64 {
    if error < eps0 {
        1.0
    } else {
        eps0 / error
    }
}

/// An accurate parent absorbs any offspring inside its box.
pub fn subsumes<M>(parent: &Rule<M>, child: &Rule<M>) -> bool {
    parent.accuracy() == 1.0 && parent.antecedent().contains(child.antecedent())
}

/// Rule population with its hyperparameters and training clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population<M> {
    params: EvoParams,
    seed: u64,
    /// Iteration counter `t`.
    iteration: u64,
    next_id: u64,
    rules: Vec<Rule<M>>,
}

impl<M> Population<M> {
    pub fn new(params: EvoParams, seed: u64) -> Self {
        Self {
            params,
            seed,
            iteration: 0,
            next_id: 0,
            rules: Vec::new(),
        }
    }

    pub fn params(&self) -> &EvoParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub(crate) fn set_iteration(&mut self, t: u64) {
        self.iteration = t;
    }

    pub fn rules(&self) -> &[Rule<M>] {
        &self.rules
    }

    pub fn rules_mut(&mut self) -> &mut [Rule<M>] {
        &mut self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Appends a rule, keeping fresh ids above every stored id.
    pub fn push(&mut self, rule: Rule<M>) {
        self.next_id = self.next_id.max(rule.id() + 1);
        self.rules.push(rule);
    }

    fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn total_numerosity(&self) -> u64 {
        self.rules.iter().map(|r| r.numerosity as u64).sum()
    }

    /// Indices of rules whose box contains `x`.
    pub fn match_set(&self, x: &[f64]) -> Vec<usize> {
        (0..self.rules.len())
            .filter(|&k| self.rules[k].antecedent().matches(x))
            .collect()
    }

    fn best_of(&self, idx: impl Iterator<Item = usize>) -> Option<usize> {
        idx.max_by(|&a, &b| self.rules[a].compare_strength(&self.rules[b]))
    }

    /// Single winner for `x`: the strongest matching rule, or when nothing
    /// matches, the rule whose box is nearest in L-infinity distance.
    pub fn winner(&self, x: &[f64]) -> Option<&Rule<M>> {
        if let Some(k) = self.best_of(self.match_set(x).into_iter()) {
            return Some(&self.rules[k]);
        }
        self.rules.iter().max_by(|a, b| {
            let (da, db) = (a.antecedent().linf_distance(x), b.antecedent().linf_distance(x));
            db.total_cmp(&da).then_with(|| a.compare_strength(b))
        })
    }

    /// Widrow-Hoff fitness update over a match set.
    pub fn update_fitness(&mut self, match_idx: &[usize]) {
        match self.params.fitness_mode {
            FitnessMode::AccuracyOnly => {
                for &k in match_idx {
                    self.rules[k].fitness = self.rules[k].accuracy();
                }
            }
            FitnessMode::Full => {
                let total: f64 = match_idx
                    .iter()
                    .map(|&k| self.rules[k].accuracy() * self.rules[k].numerosity as f64)
                    .sum();
                let beta = self.params.beta;
                for &k in match_idx {
                    let r = &mut self.rules[k];
                    let share = r.accuracy() * r.numerosity as f64 / total;
                    r.fitness += beta * (share - r.fitness);
                }
            }
        }
    }

    /// Whether the numerosity-weighted mean timestamp lags `t` by more than
    /// the EA threshold.
    pub fn ea_due(&self, match_idx: &[usize], t: u64) -> bool {
        let (mut num, mut weighted) = (0.0, 0.0);
        for &k in match_idx {
            let r = &self.rules[k];
            num += r.numerosity as f64;
            weighted += r.numerosity as f64 * r.timestamp as f64;
        }
        num > 0.0 && t as f64 - weighted / num > self.params.theta_ea
    }

    /// Removes micro-rules by roulette wheel until the budget holds.
    pub fn delete_excess(&mut self, rng: &mut impl Rng) {
        let budget = self.params.n as u64;
        while self.total_numerosity() > budget {
            let total_num = self.total_numerosity() as f64;
            let mean = self.rules.iter().map(|r| r.fitness).sum::<f64>() / total_num;
            let votes: Vec<f64> = self
                .rules
                .iter()
                .map(|r| {
                    let num = r.numerosity as f64;
                    if r.fitness / num < LOW_FITNESS_RATIO * mean {
                        LOW_FITNESS_VOTE * num
                    } else {
                        num
                    }
                })
                .collect();
            let mut spin = rng.random::<f64>() * votes.iter().sum::<f64>();
            let mut chosen = votes.len() - 1;
            for (k, v) in votes.iter().enumerate() {
                if spin < *v {
                    chosen = k;
                    break;
                }
                spin -= v;
            }
            self.rules[chosen].numerosity -= 1;
            if self.rules[chosen].numerosity == 0 {
                self.rules.remove(chosen);
            }
        }
    }

    fn tournament(&self, match_idx: &[usize], rng: &mut impl Rng) -> usize {
        let size = ((self.params.tau * match_idx.len() as f64).ceil() as usize)
            .clamp(1, match_idx.len());
        self.best_of(
            sample(rng, match_idx.len(), size)
                .into_iter()
                .map(|i| match_idx[i]),
        )
        .expect("non-empty tournament")
    }

    /// Rules that win at least one training point, in population order.
    pub fn compact(&self, data: &Dataset) -> Result<Population<M>>
    where
        M: Clone,
    {
        if self.rules.is_empty() {
            return Err(Error::Invariant("cannot compact an empty rule set".into()));
        }
        let mut keep = HashSet::new();
        for i in 0..data.len() {
            // unmatched points keep their nearest-box fallback winner
            if let Some(r) = self.winner(data.row(i)) {
                keep.insert(r.id());
            }
        }
        Ok(Population {
            params: self.params.clone(),
            seed: self.seed,
            iteration: self.iteration,
            next_id: self.next_id,
            rules: self
                .rules
                .iter()
                .filter(|r| keep.contains(&r.id()))
                .cloned()
                .collect(),
        })
    }
}

impl<M: Regressor> Population<M> {
    /// Single-winner prediction; `None` for an empty population.
    pub fn predict(&self, x: &[f64]) -> Option<f64> {
        self.winner(x).map(|r| r.consequent().predict(x))
    }

    pub fn predict_rows(&self, xs: &[&[f64]]) -> Result<Vec<f64>> {
        xs.iter()
            .map(|x| {
                self.predict(x)
                    .ok_or_else(|| Error::Input("prediction with an empty rule set".into()))
            })
            .collect()
    }
}

fn subset<'a>(ante: &Antecedent, data: &'a Dataset) -> (Vec<&'a [f64]>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..data.len() {
        let x = data.row(i);
        if ante.matches(x) {
            xs.push(x);
            ys.push(data.target(i));
        }
    }
    (xs, ys)
}

impl<M: Regressor + Clone> Population<M> {
    /// Creates (without inserting) a rule whose box contains `x`, with a
    /// consequent trained on every training point inside that box.
    pub fn cover_rule<F, R>(
        &mut self,
        x: &[f64],
        data: &Dataset,
        factory: &F,
        rng: &mut R,
    ) -> Result<Rule<M>>
    where
        F: ModelFactory<Model = M>,
        R: Rng,
    {
        let ante = Antecedent::cover(x, self.params.r0, self.params.p_hash, rng);
        let seed = rng.random::<u64>();
        let (xs, ys) = subset(&ante, data);
        if xs.is_empty() {
            return Err(Error::Invariant(
                "covering point is not part of the training data".into(),
            ));
        }
        let model = factory.fit(&xs, &ys, seed)?;
        let error = rule_error(&model, &xs, &ys)?;
        let accuracy = rule_accuracy(error, self.params.eps0);
        let id = self.fresh_id();
        Ok(Rule::new(id, ante, model, error, accuracy, COVER_FITNESS))
    }

    /// One application of the genetic algorithm on a match set whose
    /// timestamps have already been refreshed to `t`.
    pub fn run_ea<F, R>(
        &mut self,
        match_idx: &[usize],
        data: &Dataset,
        factory: &F,
        rng: &mut R,
        t: u64,
    ) -> Result<()>
    where
        F: ModelFactory<Model = M>,
        R: Rng,
    {
        if match_idx.is_empty() {
            return Ok(());
        }
        let parents = [
            self.tournament(match_idx, rng),
            self.tournament(match_idx, rng),
        ];
        let mut children = [
            self.rules[parents[0]].antecedent().clone(),
            self.rules[parents[1]].antecedent().clone(),
        ];
        let crossed = rng.random::<f64>() < self.params.chi;
        if crossed {
            let [a, b] = &mut children;
            for i in 0..a.dim() {
                match self.params.crossover_mode {
                    CrossoverMode::PairSwap => {
                        if rng.random::<f64>() < 0.5 {
                            a.swap_pair(b, i);
                        }
                    }
                    CrossoverMode::IndependentBounds => {
                        if rng.random::<f64>() < 0.5 {
                            a.swap_lower(b, i);
                        }
                        if rng.random::<f64>() < 0.5 {
                            a.swap_upper(b, i);
                        }
                        a.repair(i);
                        b.repair(i);
                    }
                }
            }
        }
        let m0 = self.params.m0;
        for child in &mut children {
            for i in 0..child.dim() {
                if rng.random::<f64>() < self.params.mu {
                    let dl = rng.random_range(-m0..m0);
                    let du = rng.random_range(-m0..m0);
                    child.shift(i, dl, du);
                }
            }
        }
        let mean_fitness =
            0.5 * (self.rules[parents[0]].fitness + self.rules[parents[1]].fitness);

        let mut offspring = Vec::with_capacity(2);
        for (ante, &p) in children.into_iter().zip(&parents) {
            let inherited = if crossed {
                mean_fitness
            } else {
                self.rules[p].fitness
            };
            let fitness = OFFSPRING_FITNESS_SCALE * inherited;
            if &ante == self.rules[p].antecedent() {
                let id = self.fresh_id();
                offspring.push(self.rules[p].offspring(id, fitness));
                continue;
            }
            let seed = rng.random::<u64>();
            let (xs, ys) = subset(&ante, data);
            if xs.is_empty() {
                continue;
            }
            let model = factory.fit(&xs, &ys, seed)?;
            let error = rule_error(&model, &xs, &ys)?;
            let accuracy = rule_accuracy(error, self.params.eps0);
            let id = self.fresh_id();
            let mut rule = Rule::new(id, ante, model, error, accuracy, fitness);
            rule.timestamp = t;
            offspring.push(rule);
        }

        for child in offspring {
            if let Some(&p) = parents.iter().find(|&&p| subsumes(&self.rules[p], &child)) {
                self.rules[p].numerosity += child.numerosity;
            } else {
                self.rules.push(child);
            }
        }
        self.delete_excess(rng);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::LinearModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[derive(Debug, Clone, PartialEq)]
    struct Constant(f64);

    impl Regressor for Constant {
        fn input_dim(&self) -> usize {
            1
        }
        fn predict(&self, _x: &[f64]) -> f64 {
            self.0
        }
    }

    fn rule(id: u64, lo: &[f64], hi: &[f64], acc: f64, f: f64) -> Rule<Constant> {
        Rule::new(
            id,
            Antecedent::new(lo.to_vec(), hi.to_vec()).unwrap(),
            Constant(id as f64),
            0.0,
            acc,
            f,
        )
    }

    fn pop(rules: Vec<Rule<Constant>>) -> Population<Constant> {
        let mut p = Population::new(EvoParams::default(), 0);
        for r in rules {
            p.push(r);
        }
        p
    }

    #[test]
    fn match_set_is_inclusive() {
        let p = pop(vec![rule(0, &[0.2, 0.0], &[0.6, 1.0], 1.0, 0.1)]);
        assert_eq!(p.match_set(&[0.4, 0.9]), vec![0]);
        assert_eq!(p.match_set(&[0.6, 0.9]), vec![0]);
        assert!(pop(vec![]).match_set(&[0.5, 0.5]).is_empty());
    }

    #[test]
    fn error_and_accuracy() {
        let xs: [&[f64]; 2] = [&[0.1], &[0.2]];
        assert_eq!(rule_error(&Constant(0.0), &xs, &[0.0, 0.0]).unwrap(), 0.0);
        let lin = LinearModel::new(vec![10.0], -1.0);
        assert!((rule_error(&lin, &xs, &[0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(rule_error(&Constant(0.0), &[], &[]).is_err());
        assert_eq!(rule_accuracy(0.01, 0.02), 1.0);
        assert_eq!(rule_accuracy(0.04, 0.02), 0.5);
        assert_eq!(rule_accuracy(0.0, 0.02), 1.0);
    }

    #[test]
    fn fitness_updates() {
        let mut p = pop(vec![rule(0, &[0.0], &[1.0], 1.0, 0.01)]);
        p.update_fitness(&[0]);
        assert!((p.rules[0].fitness - 0.208).abs() < 1e-15);

        let mut p = pop(vec![
            rule(0, &[0.0], &[1.0], 1.0, 0.5),
            rule(1, &[0.0], &[1.0], 0.5, 0.1),
        ]);
        p.rules[0].numerosity = 2;
        p.update_fitness(&[0, 1]);
        assert!((p.rules[0].fitness - 0.56).abs() < 1e-15);

        let mut p = pop(vec![rule(0, &[0.0], &[1.0], 0.37, 0.9)]);
        p.params.fitness_mode = FitnessMode::AccuracyOnly;
        p.update_fitness(&[0]);
        assert_eq!(p.rules[0].fitness, 0.37);
    }

    #[test]
    fn ea_trigger() {
        let mut p = pop(vec![rule(0, &[0.0], &[1.0], 1.0, 0.1)]);
        assert!(p.ea_due(&[0], 150));
        assert!(!p.ea_due(&[0], 100));
        p.push(rule(1, &[0.0], &[1.0], 1.0, 0.1));
        p.rules[1].numerosity = 3;
        p.rules[1].timestamp = 200;
        assert!(!p.ea_due(&[0, 1], 250));
        assert!(p.ea_due(&[0, 1], 251));
    }

    #[test]
    fn subsumption_conditions() {
        let parent = rule(0, &[0.0, 0.0], &[1.0, 1.0], 1.0, 0.1);
        let child = rule(1, &[0.2, 0.1], &[0.5, 0.9], 0.3, 0.1);
        assert!(subsumes(&parent, &child));
        let inaccurate = rule(0, &[0.0, 0.0], &[1.0, 1.0], 0.9, 0.1);
        assert!(!subsumes(&inaccurate, &child));
        let narrow = rule(0, &[0.0, 0.0], &[1.0, 0.8], 1.0, 0.1);
        assert!(!subsumes(&narrow, &child));
    }

    #[test]
    fn deletion_restores_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = pop(vec![rule(0, &[0.0], &[1.0], 1.0, 0.1)]);
        p.rules[0].numerosity = 52;
        p.delete_excess(&mut rng);
        assert_eq!(p.rules[0].numerosity, 50);

        let mut p = pop(vec![
            rule(0, &[0.0], &[1.0], 1.0, 0.1),
            rule(1, &[0.0], &[1.0], 1.0, 0.1),
            rule(2, &[0.0], &[1.0], 1.0, 0.1),
        ]);
        p.rules[0].numerosity = 30;
        p.rules[1].numerosity = 30;
        p.rules[2].numerosity = 1;
        p.delete_excess(&mut rng);
        assert_eq!(p.total_numerosity(), 50);
    }

    #[test]
    fn winner_and_fallback() {
        let p = pop(vec![
            rule(0, &[0.0], &[0.5], 1.0, 0.3),
            rule(1, &[0.4], &[1.0], 1.0, 0.9),
        ]);
        assert_eq!(p.predict(&[0.2]), Some(0.0));
        assert_eq!(p.predict(&[0.45]), Some(1.0));
        let p = pop(vec![
            rule(0, &[0.0], &[0.1], 1.0, 0.9),
            rule(1, &[0.35], &[0.5], 1.0, 0.1),
        ]);
        // distances 0.2 and 0.05
        assert_eq!(p.predict(&[0.3]), Some(1.0));
        assert_eq!(pop(vec![]).predict(&[0.3]), None);
    }

    #[test]
    fn ties_prefer_lower_error_then_older() {
        let a = rule(3, &[0.0], &[1.0], 1.0, 0.5);
        let b = rule(7, &[0.0], &[1.0], 1.0, 0.5);
        assert_eq!(a.compare_strength(&b), std::cmp::Ordering::Greater);
        let worse = Rule::new(3, a.antecedent().clone(), Constant(0.0), 0.2, 1.0, 0.5);
        assert_eq!(worse.compare_strength(&b), std::cmp::Ordering::Less);
    }

    #[test]
    fn compaction() {
        let data = Dataset::from_normalized(1, vec![0.1, 0.3, 0.7, 0.9], vec![0.0; 4], "t").unwrap();
        let p = pop(vec![rule(0, &[0.0], &[1.0], 1.0, 0.3)]);
        assert_eq!(p.compact(&data).unwrap().len(), 1);
        let p = pop(vec![
            rule(0, &[0.0], &[0.5], 1.0, 0.3),
            rule(1, &[0.6], &[1.0], 1.0, 0.3),
            rule(2, &[0.0], &[1.0], 1.0, 0.1),
        ]);
        let c = p.compact(&data).unwrap();
        assert_eq!(c.rules().iter().map(|r| r.id()).collect::<Vec<_>>(), vec![0, 1]);
        // 0.7 and 0.9 match nothing and fall back to the nearest box
        let gap = pop(vec![
            rule(0, &[0.0], &[0.5], 1.0, 0.3),
            rule(1, &[0.0], &[0.2], 1.0, 0.9),
            rule(2, &[0.55], &[0.6], 1.0, 0.1),
            rule(3, &[0.0], &[0.05], 1.0, 0.05),
        ]);
        let c = gap.compact(&data).unwrap();
        assert_eq!(c.rules().iter().map(|r| r.id()).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(matches!(pop(vec![]).compact(&data), Err(Error::Invariant(_))));
    }
}
