//! Experimental protocol: Monte Carlo cross-validation trials of any method
//! on a synthetic function or CSV dataset, with persisted reports, plot-data
//! export and cross-method statistical comparison.

mod compare;
mod method;
mod plot;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{compare_reports, Comparison, ComparisonRow};
pub use method::Method;
pub use plot::{plot_grid, write_plot_csv};
pub use report::{Aggregates, BenchmarkReport, ExperimentReport, Summary, TrialRecord};

use crate::data::{mae, read_csv_raw, sample_raw, split_indices, Dataset, RawData, Scaler, TestFunction};
use crate::error::{config, Error, Result};
use crate::evo::{train_ruleset, EvoParams, FitnessMode, Population};
use crate::kan::{kan_param_count, KanConfig, KanNetwork};
use crate::mlp::{matched_hidden_width, MlpNetwork};
use crate::model::{Consequent, ConsequentSpec, MlpConfig, Regressor};
use crate::util::mix_seed;

/// Where the data of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Problem {
    Function(TestFunction),
    Csv(PathBuf),
}

impl Problem {
    /// Short identifier: the function id or the CSV file stem.
    pub fn id(&self) -> String {
        match self {
            Problem::Function(f) => f.id().to_string(),
            Problem::Csv(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Function(t) => write!(f, "{t}"),
            Problem::Csv(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for Problem {
    type Err = Error;

    /// Function ids take precedence; anything else is a CSV path.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return config("empty problem name");
        }
        Ok(match s.parse::<TestFunction>() {
            Ok(f) => Problem::Function(f),
            Err(_) => Problem::Csv(PathBuf::from(s)),
        })
    }
}

impl From<Problem> for String {
    fn from(p: Problem) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Problem {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Full description of one benchmark cell (problem × method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub method: Method,
    pub trials: usize,
    pub train_frac: f64,
    pub seed: u64,
    /// Sample count for synthetic problems.
    pub samples: usize,
    pub evo: EvoParams,
    /// Architecture and optimizer of every KAN; the optimizer settings are
    /// shared by the MLPs.
    pub kan: KanConfig,
    /// MLP hidden width; `None` matches the KAN parameter count.
    pub mlp_hidden_width: Option<usize>,
    /// Fit the scaler on the training rows only instead of the full dataset.
    pub normalize_after_split: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Function(TestFunction::F3),
            method: Method::Xkan,
            trials: 30,
            train_frac: 0.9,
            seed: 0,
            samples: 1000,
            evo: EvoParams::default(),
            kan: KanConfig::default(),
            mlp_hidden_width: None,
            normalize_after_split: false,
        }
    }
}

/// Hidden width giving a single KAN roughly `rules` times the parameters of
/// the default `2n + 1` network.
pub fn widekan_hidden_width(n: usize, grid_count: usize, degree: usize, rules: usize) -> usize {
    let target = (rules * kan_param_count(n, grid_count, degree)) as f64;
    let per_node = ((n + 1) * (grid_count + degree + 3) + 1) as f64;
    (((target - 1.0) / per_node).round() as usize).max(1)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return config("trials must be >= 1");
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return config(format!("train fraction {} must lie in (0, 1)", self.train_frac));
        }
        if self.samples == 0 {
            return config("samples must be >= 1");
        }
        self.evo.validate()?;
        self.kan.train.validate()?;
        if self.kan.grid_count == 0 {
            return config("grid count must be >= 1");
        }
        if self.mlp_hidden_width == Some(0) {
            return config("MLP hidden width must be >= 1");
        }
        Ok(())
    }

    fn mlp_width(&self, n: usize) -> usize {
        self.mlp_hidden_width
            .unwrap_or_else(|| matched_hidden_width(n, self.kan.grid_count, self.kan.degree))
    }

    /// Consequent factory of a rule-based method; `None` for single models.
    pub fn consequent_spec(&self, n: usize) -> Option<ConsequentSpec> {
        match self.method {
            Method::Xkan | Method::XkanKappa => Some(ConsequentSpec::Kan(self.kan.clone())),
            Method::Xmlp => Some(ConsequentSpec::Mlp(MlpConfig {
                hidden_width: self.mlp_width(n),
                train: self.kan.train.clone(),
            })),
            Method::Xcsf => Some(ConsequentSpec::Linear),
            _ => None,
        }
    }

    /// Evolutionary parameters with the method's fitness mode applied.
    pub fn evo_params(&self) -> EvoParams {
        let mut p = self.evo.clone();
        if self.method == Method::XkanKappa {
            p.fitness_mode = FitnessMode::AccuracyOnly;
        }
        p
    }

    /// Loads the raw data of the configured problem. Synthetic samples are
    /// drawn from a stream of the master seed.
    pub fn load_raw(&self) -> Result<RawData> {
        match &self.problem {
            Problem::Function(f) => sample_raw(*f, self.samples, mix_seed(self.seed, 0)),
            Problem::Csv(path) => read_csv_raw(path),
        }
    }

    fn feature_bounds(&self) -> Option<(f64, f64)> {
        match &self.problem {
            Problem::Function(f) => Some(f.domain()),
            Problem::Csv(_) => None,
        }
    }

    /// Train and test sets of one trial.
    pub fn split(&self, raw: &RawData, trial_seed: u64) -> Result<(Dataset, Dataset)> {
        let (tr, te) = split_indices(raw.len(), self.train_frac, mix_seed(trial_seed, 0))?;
        let bounds = self.feature_bounds();
        if self.normalize_after_split {
            let train_raw = raw.select(&tr);
            let scaler = Scaler::fit(&train_raw, bounds)?;
            Ok((scaler.apply(&train_raw), scaler.apply(&raw.select(&te))))
        } else {
            let scaler = Scaler::fit(raw, bounds)?;
            Ok((scaler.apply(&raw.select(&tr)), scaler.apply(&raw.select(&te))))
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        mix_seed(self.seed, 1000 + trial as u64)
    }

    /// Trains the configured method on `train`.
    pub fn train_model(&self, train: &Dataset, seed: u64) -> Result<TrainedModel> {
        let n = train.dim();
        let xs = train.rows();
        let ys = train.targets();
        Ok(match self.method {
            Method::Kan | Method::Widekan => {
                let mut cfg = self.kan.clone();
                if self.method == Method::Widekan {
                    cfg.hidden_width = Some(widekan_hidden_width(
                        n,
                        cfg.grid_count,
                        cfg.degree,
                        self.evo.n,
                    ));
                }
                let mut net = KanNetwork::from_config(n, &cfg, seed)?;
                net.fit(&xs, ys)?;
                TrainedModel::Single { model: Consequent::Kan(net) }
            }
            Method::Mlp => {
                let mut net = MlpNetwork::new(n, self.mlp_width(n), self.kan.train.clone(), seed)?;
                net.fit(&xs, ys)?;
                TrainedModel::Single { model: Consequent::Mlp(net) }
            }
            _ => {
                let spec = self.consequent_spec(n).expect("rule-based method");
                let pop = train_ruleset(train, &self.evo_params(), &spec, seed)?;
                let compacted = pop.compact(train)?;
                TrainedModel::Rules {
                    uncompacted_rules: pop.len(),
                    population: compacted,
                }
            }
        })
    }

    fn run_trial(&self, raw: &RawData, trial: usize) -> TrialRecord {
        let seed = self.trial_seed(trial);
        let start = Instant::now();
        let outcome = (|| -> Result<(f64, f64, Option<usize>, Option<usize>)> {
            let (train, test) = self.split(raw, seed)?;
            let model = self.train_model(&train, mix_seed(seed, 1))?;
            let train_mae = mae(&model.predict_rows(&train.rows())?, train.targets())?;
            let test_mae = mae(&model.predict_rows(&test.rows())?, test.targets())?;
            Ok((train_mae, test_mae, model.rule_count(), model.uncompacted_rule_count()))
        })();
        let wall_time_s = start.elapsed().as_secs_f64();
        match outcome {
            Ok((train_mae, test_mae, rules, uncompacted)) => TrialRecord {
                trial,
                seed,
                train_mae: Some(train_mae),
                test_mae: Some(test_mae),
                rules,
                uncompacted_rules: uncompacted,
                wall_time_s,
                error: None,
            },
            Err(e) => TrialRecord {
                trial,
                seed,
                train_mae: None,
                test_mae: None,
                rules: None,
                uncompacted_rules: None,
                wall_time_s,
                error: Some(e.to_string()),
            },
        }
    }
}

/// A trained model of any method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    /// Compacted rule set.
    Rules {
        uncompacted_rules: usize,
        population: Population<Consequent>,
    },
    Single { model: Consequent },
}

impl TrainedModel {
    pub fn rule_count(&self) -> Option<usize> {
        match self {
            TrainedModel::Rules { population, .. } => Some(population.len()),
            TrainedModel::Single { .. } => None,
        }
    }

    pub fn uncompacted_rule_count(&self) -> Option<usize> {
        match self {
            TrainedModel::Rules {
                uncompacted_rules, ..
            } => Some(*uncompacted_rules),
            TrainedModel::Single { .. } => None,
        }
    }

    pub fn input_dim(&self) -> Option<usize> {
        match self {
            TrainedModel::Rules { population, .. } => {
                population.rules().first().map(|r| r.antecedent().dim())
            }
            TrainedModel::Single { model: c } => Some(c.input_dim()),
        }
    }

    pub fn predict_rows(&self, xs: &[&[f64]]) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Rules { population, .. } => population.predict_rows(xs),
            TrainedModel::Single { model: c } => Ok(c.predict_many(xs)),
        }
    }

    /// Structural checks for documents read from disk.
    pub fn validate(&self) -> Result<()> {
        match self {
            TrainedModel::Single { model: c } => c.validate(),
            TrainedModel::Rules { population, .. } => {
                let dim = self.input_dim();
                for r in population.rules() {
                    r.antecedent().validate()?;
                    r.consequent().validate()?;
                    if Some(r.antecedent().dim()) != dim || r.consequent().input_dim() != r.antecedent().dim() {
                        return config("rule dimensions are inconsistent");
                    }
                }
                Ok(())
            }
        }
    }
}

/// A trained model together with what is needed to apply it to raw data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub method: Method,
    pub problem: String,
    pub seed: u64,
    pub scaler: Scaler,
    pub model: TrainedModel,
}

impl ModelDocument {
    pub fn write_json(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Reads and structurally validates a model file.
    pub fn read_json(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let doc: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        doc.model.validate()?;
        let dim = doc.scaler.feature_min.len();
        if doc.scaler.feature_max.len() != dim || doc.model.input_dim().is_some_and(|d| d != dim) {
            return config("model and scaler dimensions disagree");
        }
        Ok(doc)
    }

    /// Normalizes `raw` with the stored scaler and returns the test MAE on
    /// normalized targets.
    pub fn evaluate(&self, raw: &RawData) -> Result<f64> {
        if raw.dim != self.scaler.feature_min.len() {
            return crate::error::input(format!(
                "data has {} features, model expects {}",
                raw.dim,
                self.scaler.feature_min.len()
            ));
        }
        let data = self.scaler.apply(raw);
        mae(&self.model.predict_rows(&data.rows())?, data.targets())
    }
}

/// Runs every trial of an experiment, `jobs` at a time (0 = all cores).
/// Failed trials are recorded rather than aborting the experiment.
pub fn run_benchmark(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    let raw = cfg.load_raw()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| cfg.run_trial(&raw, t))
            .collect()
    });
    Ok(ExperimentReport::new(cfg.clone(), records))
}
