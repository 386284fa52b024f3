//! Flat JSON configuration files and their merge with flags and defaults.

use std::path::Path;

use serde::Deserialize;
use xkan_core::bench::{ExperimentConfig, Method};
use xkan_core::evo::{CrossoverMode, FitnessMode};
use xkan_core::optim::Optimizer;

use crate::CliError;

/// Environment variable supplying a default master seed.
pub const SEED_ENV: &str = "XKAN_SEED";

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub train_frac: Option<f64>,
    pub samples: Option<usize>,
    pub jobs: Option<usize>,
    pub normalize_after_split: Option<bool>,
    // rule evolution
    pub r0: Option<f64>,
    pub p_hash: Option<f64>,
    pub eps0: Option<f64>,
    pub beta: Option<f64>,
    pub theta_ea: Option<f64>,
    pub tau: Option<f64>,
    pub chi: Option<f64>,
    pub mu: Option<f64>,
    pub m0: Option<f64>,
    pub n: Option<usize>,
    pub epochs: Option<usize>,
    pub fitness_mode: Option<FitnessMode>,
    pub crossover_mode: Option<CrossoverMode>,
    // networks
    pub grid_count: Option<usize>,
    pub degree: Option<usize>,
    pub hidden_width: Option<usize>,
    pub mlp_hidden_width: Option<usize>,
    pub optimizer: Option<Optimizer>,
    pub learning_rate: Option<f64>,
    pub net_epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub history_size: Option<usize>,
    pub max_iter: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Applies the file's values on top of the built-in defaults.
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        fn set<T: Clone>(dst: &mut T, src: &Option<T>) {
            if let Some(v) = src {
                *dst = v.clone();
            }
        }
        set(&mut cfg.method, &self.method);
        set(&mut cfg.seed, &self.seed);
        set(&mut cfg.trials, &self.trials);
        set(&mut cfg.train_frac, &self.train_frac);
        set(&mut cfg.samples, &self.samples);
        set(&mut cfg.normalize_after_split, &self.normalize_after_split);
        let e = &mut cfg.evo;
        set(&mut e.r0, &self.r0);
        set(&mut e.p_hash, &self.p_hash);
        set(&mut e.eps0, &self.eps0);
        set(&mut e.beta, &self.beta);
        set(&mut e.theta_ea, &self.theta_ea);
        set(&mut e.tau, &self.tau);
        set(&mut e.chi, &self.chi);
        set(&mut e.mu, &self.mu);
        set(&mut e.m0, &self.m0);
        set(&mut e.n, &self.n);
        set(&mut e.epochs, &self.epochs);
        set(&mut e.fitness_mode, &self.fitness_mode);
        set(&mut e.crossover_mode, &self.crossover_mode);
        let k = &mut cfg.kan;
        set(&mut k.grid_count, &self.grid_count);
        set(&mut k.degree, &self.degree);
        if self.hidden_width.is_some() {
            k.hidden_width = self.hidden_width;
        }
        if self.mlp_hidden_width.is_some() {
            cfg.mlp_hidden_width = self.mlp_hidden_width;
        }
        let t = &mut cfg.kan.train;
        if let Some(opt) = self.optimizer {
            // switching optimizer also switches its default step size
            if opt != t.optimizer {
                let epochs = t.epochs;
                *t = match opt {
                    Optimizer::Adam => xkan_core::optim::TrainConfig::adam(),
                    Optimizer::Lbfgs => xkan_core::optim::TrainConfig::default(),
                };
                t.epochs = epochs;
            }
        }
        set(&mut t.learning_rate, &self.learning_rate);
        set(&mut t.epochs, &self.net_epochs);
        set(&mut t.batch_size, &self.batch_size);
        set(&mut t.history_size, &self.history_size);
        set(&mut t.max_iter, &self.max_iter);
    }
}

/// Flag values shared by the experiment-running subcommands.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub train_frac: Option<f64>,
    pub samples: Option<usize>,
}

/// Resolves an experiment configuration: flag > config file > `XKAN_SEED`
/// (seed only) > built-in default.
pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Ok(v) = std::env::var(SEED_ENV) {
        cfg.seed = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?;
    }
    file.apply(&mut cfg);
    if let Some(m) = flags.method {
        cfg.method = m;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(t) = flags.trials {
        cfg.trials = t;
    }
    if let Some(f) = flags.train_frac {
        cfg.train_frac = f;
    }
    if let Some(s) = flags.samples {
        cfg.samples = s;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}
