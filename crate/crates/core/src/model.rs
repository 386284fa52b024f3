//! Consequent models and the factories that train them on rule-local data.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::kan::{KanConfig, KanNetwork};
use crate::linear::LinearModel;
use crate::mlp::MlpNetwork;
use crate::optim::TrainConfig;

/// A trained single-output regressor.
pub trait Regressor {
    fn input_dim(&self) -> usize;

    /// Evaluates the model. `x` must have `input_dim()` entries.
    fn predict(&self, x: &[f64]) -> f64;

    fn predict_many(&self, xs: &[&[f64]]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Builds and trains a fresh consequent on a rule's data subset.
pub trait ModelFactory: Sync {
    type Model: Regressor + Clone + Send + Sync;

    fn fit(&self, xs: &[&[f64]], ys: &[f64], seed: u64) -> Result<Self::Model>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_width: usize,
    pub train: TrainConfig,
}

/// Serializable consequent of any supported kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Consequent {
    Kan(KanNetwork),
    Mlp(MlpNetwork),
    Linear(LinearModel),
}

impl Consequent {
    pub fn validate(&self) -> Result<()> {
        match self {
            Consequent::Kan(k) => k.validate(),
            Consequent::Mlp(m) => m.validate(),
            Consequent::Linear(_) => Ok(()),
        }
    }
}

impl Regressor for Consequent {
    fn input_dim(&self) -> usize {
        match self {
            Consequent::Kan(k) => k.input_dim(),
            Consequent::Mlp(m) => m.input_dim(),
            Consequent::Linear(l) => l.input_dim(),
        }
    }

    fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Consequent::Kan(k) => k.predict(x),
            Consequent::Mlp(m) => m.predict(x),
            Consequent::Linear(l) => l.predict(x),
        }
    }

    fn predict_many(&self, xs: &[&[f64]]) -> Vec<f64> {
        match self {
            Consequent::Kan(k) => k.predict_many(xs),
            Consequent::Mlp(m) => m.predict_many(xs),
            Consequent::Linear(l) => l.predict_many(xs),
        }
    }
}

/// Which consequent to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConsequentSpec {
    Kan(KanConfig),
    Mlp(MlpConfig),
    Linear,
}

impl ModelFactory for ConsequentSpec {
    type Model = Consequent;

    fn fit(&self, xs: &[&[f64]], ys: &[f64], seed: u64) -> Result<Consequent> {
        if xs.is_empty() {
            return input("cannot fit a consequent on an empty subset");
        }
        let n = xs[0].len();
        Ok(match self {
            ConsequentSpec::Kan(cfg) => {
                let mut net = KanNetwork::from_config(n, cfg, seed)?;
                net.fit(xs, ys)?;
                Consequent::Kan(net)
            }
            ConsequentSpec::Mlp(cfg) => {
                let mut net = MlpNetwork::new(n, cfg.hidden_width, cfg.train.clone(), seed)?;
                net.fit(xs, ys)?;
                Consequent::Mlp(net)
            }
            ConsequentSpec::Linear => Consequent::Linear(LinearModel::fit(xs, ys)?),
        })
    }
}
