//! Three-layer SiLU perceptron used as a parameter-matched baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{config, input, Result};
use crate::kan::kan_param_count;
use crate::model::Regressor;
use crate::optim::{train, TrainConfig, Trainable};
use crate::util::{mix_seed, silu, silu_and_grad};

/// `H(n + 2) + 1`.
pub fn mlp_param_count(n: usize, hidden: usize) -> usize {
    hidden * (n + 2) + 1
}

/// Hidden width whose parameter count is nearest to the KAN's. Exact equality
/// is not always reachable; the gap is below `n + 2` parameters.
pub fn matched_hidden_width(n: usize, grid_count: usize, degree: usize) -> usize {
    let target = kan_param_count(n, grid_count, degree) as f64;
    (((target - 1.0) / (n + 2) as f64).round() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    input_dim: usize,
    hidden_width: usize,
    /// Row-major `H x n`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
    seed: u64,
    train_config: TrainConfig,
}

impl MlpNetwork {
    /// Gaussian weights with standard deviation `1/sqrt(fan_in)`, zero biases.
    pub fn new(n: usize, hidden: usize, train_config: TrainConfig, seed: u64) -> Result<Self> {
        if n == 0 || hidden == 0 {
            return config(format!("MLP needs n >= 1 and H >= 1 (got n={n}, H={hidden})"));
        }
        train_config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = Normal::new(0.0, 1.0 / (n as f64).sqrt()).expect("valid std");
        let d2 = Normal::new(0.0, 1.0 / (hidden as f64).sqrt()).expect("valid std");
        Ok(Self {
            input_dim: n,
            hidden_width: hidden,
            w1: (0..hidden * n).map(|_| d1.sample(&mut rng)).collect(),
            b1: vec![0.0; hidden],
            w2: (0..hidden).map(|_| d2.sample(&mut rng)).collect(),
            b2: 0.0,
            seed,
            train_config,
        })
    }

    /// Builds a network from explicit weights; `w1` is row-major `H x n`.
    pub fn from_weights(w1: Vec<f64>, b1: Vec<f64>, w2: Vec<f64>, b2: f64) -> Result<Self> {
        let hidden = b1.len();
        if hidden == 0 || w2.len() != hidden || w1.len() % hidden != 0 || w1.is_empty() {
            return config("inconsistent MLP weight shapes");
        }
        Ok(Self {
            input_dim: w1.len() / hidden,
            hidden_width: hidden,
            w1,
            b1,
            w2,
            b2,
            seed: 0,
            train_config: TrainConfig::default(),
        })
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden_width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn allocated_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0
            || self.w1.len() != self.input_dim * self.hidden_width
            || self.b1.len() != self.hidden_width
            || self.w2.len() != self.hidden_width
        {
            return config("MLP document has inconsistent dimensions");
        }
        Ok(())
    }

    #[inline]
    fn pre_activation(&self, x: &[f64], j: usize) -> f64 {
        let row = &self.w1[j * self.input_dim..(j + 1) * self.input_dim];
        self.b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// `w2 . silu(W1 x + b1) + b2`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return input(format!(
                "expected {} inputs, got {}",
                self.input_dim,
                x.len()
            ));
        }
        Ok(self.predict(x))
    }

    pub fn train(&mut self, xs: &[&[f64]], ys: &[f64], epochs: usize) -> Result<Vec<f64>> {
        if epochs == 0 {
            return config("epochs must be >= 1");
        }
        let cfg = TrainConfig {
            epochs,
            ..self.train_config.clone()
        };
        train(self, xs, ys, &cfg, mix_seed(self.seed, 1))
    }

    pub fn fit(&mut self, xs: &[&[f64]], ys: &[f64]) -> Result<Vec<f64>> {
        let epochs = self.train_config.epochs;
        self.train(xs, ys, epochs)
    }
}

impl Trainable for MlpNetwork {
    fn num_params(&self) -> usize {
        mlp_param_count(self.input_dim, self.hidden_width)
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(usize, &mut f64)) {
        let mut i = 0;
        for p in self
            .w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(std::iter::once(&mut self.b2))
        {
            f(i, p);
            i += 1;
        }
    }

    fn accumulate_grad(&self, xs: &[&[f64]], ys: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let n = self.input_dim;
        let h = self.hidden_width;
        let (gw1, rest) = grad.split_at_mut(h * n);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h);
        let mut act = vec![0.0; h];
        let mut dact = vec![0.0; h];
        let mut sse = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let mut pred = self.b2;
            for j in 0..h {
                let (a, d) = silu_and_grad(self.pre_activation(x, j));
                act[j] = a;
                dact[j] = d;
                pred += self.w2[j] * a;
            }
            let r = pred - y;
            sse += r * r;
            let dy = 2.0 * r * scale;
            gb2[0] += dy;
            for j in 0..h {
                gw2[j] += dy * act[j];
                let dz = dy * self.w2[j] * dact[j];
                gb1[j] += dz;
                for (g, v) in gw1[j * n..(j + 1) * n].iter_mut().zip(x.iter()) {
                    *g += dz * v;
                }
            }
        }
        sse
    }
}

impl Regressor for MlpNetwork {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        self.b2
            + (0..self.hidden_width)
                .map(|j| self.w2[j] * silu(self.pre_activation(x, j)))
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_counts() {
        assert_eq!(mlp_param_count(2, 35), 141);
        assert_eq!(mlp_param_count(1, 1), 4);
        assert_eq!(mlp_param_count(5, 86), 603);
        for n in [1, 2, 5, 8] {
            let h = matched_hidden_width(n, 3, 3);
            let net = MlpNetwork::new(n, h, TrainConfig::default(), 0).unwrap();
            assert_eq!(net.allocated_params(), mlp_param_count(n, h));
        }
    }

    #[test]
    fn matched_width() {
        assert_eq!(matched_hidden_width(2, 3, 3), 35);
        assert_eq!(matched_hidden_width(5, 3, 3), 86);
        assert_eq!(matched_hidden_width(1, 3, 3), 19);
        // Enumeration check that 86 is the closest width for n = 5.
        let target = kan_param_count(5, 3, 3) as i64;
        let best = (85..=87)
            .min_by_key(|h| (mlp_param_count(5, *h) as i64 - target).abs())
            .unwrap();
        assert_eq!(best, 86);
        for n in 1..=16 {
            let h = matched_hidden_width(n, 3, 3);
            let gap = (mlp_param_count(n, h) as i64 - kan_param_count(n, 3, 3) as i64).abs();
            assert!(gap < (n + 2) as i64);
        }
    }

    #[test]
    fn zero_network_and_hand_evaluation() {
        let zero = MlpNetwork::from_weights(vec![0.0; 4], vec![0.0; 2], vec![0.0; 2], 0.0).unwrap();
        assert_eq!(zero.forward(&[0.3, 0.8]).unwrap(), 0.0);
        // H = 1: 1.5 * silu(0.5 * 0.4 - 0.1) + 0.2
        let net = MlpNetwork::from_weights(vec![0.5], vec![-0.1], vec![1.5], 0.2).unwrap();
        let z: f64 = 0.1;
        let expected = 1.5 * z / (1.0 + (-z).exp()) + 0.2;
        assert!((net.forward(&[0.4]).unwrap() - expected).abs() < 1e-15);
        assert!(net.forward(&[0.4, 0.1]).is_err());
        assert_eq!(
            net.forward(&[0.4]).unwrap().to_bits(),
            net.forward(&[0.4]).unwrap().to_bits()
        );
    }

    #[test]
    fn constant_target_and_determinism() {
        let data: Vec<Vec<f64>> = (0..500)
            .map(|i| vec![(i % 25) as f64 / 24.0, (i / 25) as f64 / 19.0])
            .collect();
        let xs: Vec<&[f64]> = data.iter().map(|r| r.as_slice()).collect();
        let ys = vec![-0.4; xs.len()];
        let mut a = MlpNetwork::new(2, 35, TrainConfig::default(), 3).unwrap();
        let ha = a.train(&xs, &ys, 10).unwrap();
        let mae: f64 =
            xs.iter().map(|x| (a.predict(x) + 0.4).abs()).sum::<f64>() / xs.len() as f64;
        assert!(mae < 0.05, "mae {mae}");
        let mut b = MlpNetwork::new(2, 35, TrainConfig::default(), 3).unwrap();
        assert_eq!(b.train(&xs, &ys, 10).unwrap(), ha);
        assert!(b.train(&xs, &ys, 0).is_err());
    }
}
