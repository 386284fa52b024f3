//! Benchmark functions, dataset ingestion, normalization and splitting.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, input, Error, Result};

/// Synthetic benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// Eggholder on `[-512, 512]^2`.
    F1,
    /// Sine-in-sine on `[0, 1]^2`.
    F2,
    /// Cross function on `[-1, 1]^2`.
    F3,
    /// Styblinski-Tang on `[-5, 5]^2`.
    F4,
    /// One-dimensional piecewise function with two jumps on `[0, 1]`.
    Disc,
}

impl TestFunction {
    pub const ALL: [TestFunction; 5] = [Self::F1, Self::F2, Self::F3, Self::F4, Self::Disc];

    pub fn id(self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
            Self::Disc => "disc",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::Disc => 1,
            _ => 2,
        }
    }

    /// Raw-domain bounds, identical for every coordinate.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Self::F1 => (-512.0, 512.0),
            Self::F2 | Self::Disc => (0.0, 1.0),
            Self::F3 => (-1.0, 1.0),
            Self::F4 => (-5.0, 5.0),
        }
    }

    /// Evaluates the function at a raw-domain point.
    pub fn eval(self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return input(format!(
                "{} takes {} inputs, got {}",
                self.id(),
                self.dim(),
                x.len()
            ));
        }
        let (lo, hi) = self.domain();
        if let Some(v) = x.iter().find(|v| !(lo..=hi).contains(*v)) {
            return input(format!("{v} lies outside the {} domain [{lo}, {hi}]", self.id()));
        }
        use std::f64::consts::PI;
        Ok(match self {
            Self::F1 => {
                let (x1, x2) = (x[0], x[1]);
                -(x2 + 47.0) * (x1 / 2.0 + x2 + 47.0).abs().sqrt().sin()
                    - x1 * (x1 - (x2 + 47.0)).abs().sqrt().sin()
            }
            Self::F2 => (4.0 * PI * (x[0] + (PI * x[1]).sin())).sin(),
            Self::F3 => {
                let (x1, x2) = (x[0], x[1]);
                (-10.0 * x1 * x1)
                    .exp()
                    .max((-50.0 * x2 * x2).exp())
                    .max(1.25 * (-5.0 * (x1 * x1 + x2 * x2)).exp())
            }
            Self::F4 => {
                x.iter()
                    .map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v)
                    .sum::<f64>()
                    / 2.0
            }
            Self::Disc => {
                let v = x[0];
                if v < 0.25 {
                    2.0 * v
                } else if v < 0.5 {
                    v * v
                } else {
                    (2.0 * PI * v).sin()
                }
            }
        })
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::Config(format!("unknown function '{s}' (f1|f2|f3|f4|disc)")))
    }
}

/// Unnormalized samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawData {
    pub dim: usize,
    /// Row-major `len x dim`.
    pub features: Vec<f64>,
    pub targets: Vec<f64>,
    pub feature_names: Vec<String>,
    pub provenance: String,
}

impl RawData {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn select(&self, idx: &[usize]) -> RawData {
        RawData {
            dim: self.dim,
            features: idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Writes a header line and one row per sample, target last.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv_to(std::fs::File::create(path)?)
    }

    pub fn write_csv_to(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.feature_names.clone();
        header.push("y".to_string());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            rec.push(self.targets[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Min-max normalization: features to `[0, 1]`, targets to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
}

impl Scaler {
    /// Fits target bounds from the data and feature bounds either from
    /// `feature_bounds` (one shared range) or from the data.
    pub fn fit(raw: &RawData, feature_bounds: Option<(f64, f64)>) -> Result<Self> {
        if raw.is_empty() {
            return input("cannot fit a scaler on an empty dataset");
        }
        let (feature_min, feature_max) = match feature_bounds {
            Some((lo, hi)) => (vec![lo; raw.dim], vec![hi; raw.dim]),
            None => {
                let mut lo = vec![f64::INFINITY; raw.dim];
                let mut hi = vec![f64::NEG_INFINITY; raw.dim];
                for i in 0..raw.len() {
                    for (j, v) in raw.row(i).iter().enumerate() {
                        lo[j] = lo[j].min(*v);
                        hi[j] = hi[j].max(*v);
                    }
                }
                (lo, hi)
            }
        };
        let target_min = raw.targets.iter().copied().fold(f64::INFINITY, f64::min);
        let target_max = raw.targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(target_max > target_min) {
            return input("target column is constant; cannot normalize to [-1, 1]");
        }
        Ok(Self {
            feature_min,
            feature_max,
            target_min,
            target_max,
        })
    }

    /// Constant features map to 0.5.
    pub fn normalize_feature(&self, j: usize, v: f64) -> f64 {
        let (lo, hi) = (self.feature_min[j], self.feature_max[j]);
        if hi > lo {
            (v - lo) / (hi - lo)
        } else {
            0.5
        }
    }

    pub fn normalize_target(&self, y: f64) -> f64 {
        if y == self.target_min {
            return -1.0;
        }
        if y == self.target_max {
            return 1.0;
        }
        2.0 * (y - self.target_min) / (self.target_max - self.target_min) - 1.0
    }

    pub fn denormalize_target(&self, y: f64) -> f64 {
        (y + 1.0) / 2.0 * (self.target_max - self.target_min) + self.target_min
    }

    pub fn apply(&self, raw: &RawData) -> Dataset {
        let features = (0..raw.len())
            .flat_map(|i| {
                raw.row(i)
                    .iter()
                    .enumerate()
                    .map(|(j, v)| self.normalize_feature(j, *v))
                    .collect::<Vec<_>>()
            })
            .collect();
        Dataset {
            dim: raw.dim,
            features,
            targets: raw.targets.iter().map(|y| self.normalize_target(*y)).collect(),
            scaler: self.clone(),
            provenance: raw.provenance.clone(),
        }
    }
}

/// Normalized dataset with the scaler that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    targets: Vec<f64>,
    scaler: Scaler,
    provenance: String,
}

impl Dataset {
    /// Builds a dataset from already-normalized values.
    pub fn from_normalized(
        dim: usize,
        features: Vec<f64>,
        targets: Vec<f64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 || features.len() != dim * targets.len() {
            return input("feature matrix does not match target count");
        }
        Ok(Self {
            dim,
            features,
            targets,
            scaler: Scaler {
                feature_min: vec![0.0; dim],
                feature_max: vec![1.0; dim],
                target_min: -1.0,
                target_max: 1.0,
            },
            provenance: provenance.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<&[f64]> {
        self.features.chunks_exact(self.dim).collect()
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            dim: self.dim,
            features: idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
            scaler: self.scaler.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Draws `m` uniform points from the raw domain of `f` (raw values).
pub fn sample_raw(f: TestFunction, m: usize, seed: u64) -> Result<RawData> {
    if m == 0 {
        return config("sample count must be >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = f.domain();
    let mut features = Vec::with_capacity(m * f.dim());
    let mut targets = Vec::with_capacity(m);
    for _ in 0..m {
        let start = features.len();
        for _ in 0..f.dim() {
            features.push(rng.random_range(lo..=hi));
        }
        targets.push(f.eval(&features[start..])?);
    }
    Ok(RawData {
        dim: f.dim(),
        features,
        targets,
        feature_names: (1..=f.dim()).map(|i| format!("x{i}")).collect(),
        provenance: f.id().to_string(),
    })
}

/// Samples and normalizes: features by the domain bounds, targets by the
/// sample's own extrema.
pub fn sample_dataset(f: TestFunction, m: usize, seed: u64) -> Result<Dataset> {
    let raw = sample_raw(f, m, seed)?;
    Ok(Scaler::fit(&raw, Some(f.domain()))?.apply(&raw))
}

/// Reads a headered CSV whose last column is the target. Error rows are
/// reported as 1-based line numbers of the file (the header is line 1).
pub fn read_csv_raw(path: impl AsRef<Path>) -> Result<RawData> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Parse {
            row: 1,
            msg: "need at least one feature column and one target column".into(),
        });
    }
    let dim = header.len() - 1;
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row: line,
                msg: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: line,
                msg: format!("non-numeric value '{cell}' in column {}", j + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    msg: format!("non-finite value in column {}", j + 1),
                });
            }
            if j < dim {
                features.push(v);
            } else {
                targets.push(v);
            }
        }
    }
    if targets.len() < 2 {
        return Err(Error::Parse {
            row: targets.len() + 1,
            msg: "need at least two data rows".into(),
        });
    }
    Ok(RawData {
        dim,
        features,
        targets,
        feature_names: header.iter().take(dim).map(str::to_string).collect(),
        provenance: path.display().to_string(),
    })
}

/// Reads and normalizes a CSV with empirical feature bounds.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let raw = read_csv_raw(path)?;
    Ok(Scaler::fit(&raw, None)?.apply(&raw))
}

/// Shuffled index split: the first `floor(frac * m)` indices train.
pub fn split_indices(m: usize, train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return config(format!("train fraction {train_frac} must lie in (0, 1)"));
    }
    let cut = (train_frac * m as f64).floor() as usize;
    if cut == 0 || cut == m {
        return input(format!(
            "splitting {m} rows at fraction {train_frac} leaves one side empty"
        ));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = idx.split_off(cut);
    Ok((idx, test))
}

/// Monte Carlo cross-validation split of a normalized dataset.
pub fn mc_split(data: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (tr, te) = split_indices(data.len(), train_frac, seed)?;
    Ok((data.select(&tr), data.select(&te)))
}

/// Mean absolute error.
pub fn mae(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return input(format!(
            "length mismatch: {} predictions vs {} targets",
            predictions.len(),
            targets.len()
        ));
    }
    if targets.is_empty() {
        return input("MAE of an empty vector");
    }
    Ok(predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / targets.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn function_values() {
        assert_eq!(TestFunction::F2.eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(TestFunction::F3.eval(&[0.0, 0.0]).unwrap(), 1.25);
        assert_eq!(TestFunction::F4.eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((TestFunction::Disc.eval(&[0.1]).unwrap() - 0.2).abs() < 1e-15);
        assert!((TestFunction::Disc.eval(&[0.75]).unwrap() + 1.0).abs() < 1e-15);
        let f1 = TestFunction::F1.eval(&[0.0, 0.0]).unwrap();
        assert!((f1 - (-47.0 * 47f64.sqrt().sin())).abs() < 1e-12);
        assert!((f1 + 25.46).abs() < 0.01);
        let f4 = TestFunction::F4.eval(&[-2.903534, -2.903534]).unwrap();
        assert!((f4 + 78.332).abs() < 1e-3);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        assert!(TestFunction::F3.eval(&[1.5, 0.0]).is_err());
        assert!(TestFunction::Disc.eval(&[-0.1]).is_err());
        assert!(TestFunction::F1.eval(&[0.0]).is_err());
        assert!("f9".parse::<TestFunction>().is_err());
        assert_eq!("disc".parse::<TestFunction>().unwrap(), TestFunction::Disc);
    }

    #[test]
    fn sampled_dataset_is_normalized() {
        for f in TestFunction::ALL {
            let d = sample_dataset(f, 1000, 3).unwrap();
            assert_eq!(d.len(), 1000);
            assert_eq!(d.dim(), f.dim());
            assert!(d.rows().iter().flat_map(|r| r.iter()).all(|v| (0.0..=1.0).contains(v)));
            let lo = d.targets().iter().copied().fold(f64::INFINITY, f64::min);
            let hi = d.targets().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((lo, hi), (-1.0, 1.0));
            assert_eq!(d, sample_dataset(f, 1000, 3).unwrap());
        }
    }

    #[test]
    fn csv_parse_and_degenerate_feature() {
        let f = write_tmp("a,b,y\n1,5,0.5\n2,5,1.5\n3,5,2.5\n");
        let d = load_csv(f.path()).unwrap();
        assert_eq!((d.dim(), d.len()), (2, 3));
        assert_eq!(d.row(1), &[0.5, 0.5]);
        assert_eq!(d.targets(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn csv_errors_name_the_line() {
        let mut body = String::from("a,y\n");
        for i in 0..5 {
            body.push_str(&format!("{i},{}\n", i * 2));
        }
        body.push_str("oops,3\n");
        let f = write_tmp(&body);
        match load_csv(f.path()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 7),
            other => panic!("unexpected {other:?}"),
        }
        let f = write_tmp("a,y\n1,2\n3\n");
        assert!(matches!(load_csv(f.path()), Err(Error::Parse { row: 3, .. })));
        let f = write_tmp("a,y\n1,2\n");
        assert!(load_csv(f.path()).is_err());
        let f = write_tmp("a,y\n1,2\n3,2\n");
        assert!(matches!(load_csv(f.path()), Err(Error::Input(_))));
    }

    #[test]
    fn split_partitions_rows() {
        let (tr, te) = split_indices(1000, 0.9, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (900, 100));
        let mut all: Vec<usize> = tr.iter().chain(&te).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        assert_eq!(split_indices(1000, 0.9, 1).unwrap().0, tr);
        assert_ne!(split_indices(1000, 0.9, 2).unwrap().0, tr);
        assert!(split_indices(5, 0.1, 0).is_err());
        assert!(split_indices(5, 1.0, 0).is_err());
    }

    #[test]
    fn mae_cases() {
        assert_eq!(mae(&[0.3, 0.1], &[0.3, 0.1]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 1.0], &[0.0, 0.0]).unwrap(), 0.5);
        assert!(mae(&[0.0], &[0.0, 1.0]).is_err());
        assert!(mae(&[], &[]).is_err());
    }
}
