//! Three-layer Kolmogorov-Arnold network with B-spline-plus-SiLU edges.
//!
//! The hidden layer has `2n + 1` nodes by default. Every edge computes
//!
//! ```text
//! phi(t) = gate * (w_b * silu(t) + w_s * sum_i c_i B_i(t))
//! ```
//!
//! and every non-input node adds a learnable bias to the sum of its incoming
//! edges. With `G + K` spline coefficients plus `w_b`, `w_s` and the gate on
//! each edge, the learnable parameter count is
//! `(2n^2 + 3n + 1)(G + K) + (6n^2 + 11n + 5)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{config, input, Result};
use crate::model::Regressor;
use crate::optim::{train, TrainConfig, Trainable};
use crate::spline::SplineGrid;
use crate::util::{mix_seed, silu_and_grad};

/// Standard deviation of the initial spline coefficients.
pub const INIT_COEF_STD: f64 = 0.1;
/// Relative padding applied to hidden-sum ranges by [`KanNetwork::adapt_grids`].
pub const GRID_PADDING: f64 = 0.1;

/// Parameter count of the default `n -> 2n+1 -> 1` network.
pub fn kan_param_count(n: usize, grid_count: usize, degree: usize) -> usize {
    (2 * n * n + 3 * n + 1) * (grid_count + degree) + (6 * n * n + 11 * n + 5)
}

/// Parameter count for an arbitrary hidden width.
pub fn kan_param_count_with_width(
    n: usize,
    hidden: usize,
    grid_count: usize,
    degree: usize,
) -> usize {
    let per_edge = grid_count + degree + 3;
    hidden * n * per_edge + hidden + hidden * per_edge + 1
}

/// Architecture and optimizer settings for [`KanNetwork`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KanConfig {
    pub grid_count: usize,
    pub degree: usize,
    /// Hidden width; `None` means `2n + 1`.
    pub hidden_width: Option<usize>,
    /// Input-layer grid range.
    pub grid_range: (f64, f64),
    pub train: TrainConfig,
}

impl Default for KanConfig {
    fn default() -> Self {
        Self {
            grid_count: 3,
            degree: 3,
            hidden_width: None,
            grid_range: (0.0, 1.0),
            train: TrainConfig::default(),
        }
    }
}

/// One learnable univariate activation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeActivation {
    pub coefficients: Vec<f64>,
    pub base_weight: f64,
    pub spline_weight: f64,
    pub gate: f64,
}

impl EdgeActivation {
    fn random(num_basis: usize, rng: &mut ChaCha8Rng, normal: &Normal<f64>) -> Self {
        Self {
            coefficients: (0..num_basis).map(|_| normal.sample(rng)).collect(),
            base_weight: 1.0,
            spline_weight: 1.0,
            gate: 1.0,
        }
    }

    #[inline]
    fn spline(&self, basis: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(basis)
            .map(|(c, b)| c * b)
            .sum()
    }

    /// Evaluates the activation given precomputed basis values and silu(t).
    #[inline]
    fn eval(&self, basis: &[f64], silu: f64) -> f64 {
        self.gate * (self.base_weight * silu + self.spline_weight * self.spline(basis))
    }

    fn for_each_param_mut(&mut self, offset: &mut usize, f: &mut dyn FnMut(usize, &mut f64)) {
        for c in &mut self.coefficients {
            f(*offset, c);
            *offset += 1;
        }
        f(*offset, &mut self.base_weight);
        f(*offset + 1, &mut self.spline_weight);
        f(*offset + 2, &mut self.gate);
        *offset += 3;
    }

    /// Accumulates parameter gradients for upstream gradient `g` and returns
    /// `g * d phi / d t`.
    #[inline]
    fn backward(
        &self,
        basis: &[f64],
        dbasis: Option<&[f64]>,
        silu: f64,
        dsilu: f64,
        g: f64,
        grad: &mut [f64],
    ) -> f64 {
        let nb = self.coefficients.len();
        let spline = self.spline(basis);
        let gs = g * self.gate * self.spline_weight;
        for (gc, b) in grad[..nb].iter_mut().zip(basis) {
            *gc += gs * b;
        }
        grad[nb] += g * self.gate * silu;
        grad[nb + 1] += g * self.gate * spline;
        grad[nb + 2] += g * (self.base_weight * silu + self.spline_weight * spline);
        match dbasis {
            Some(db) => {
                let dspline: f64 = self.coefficients.iter().zip(db).map(|(c, d)| c * d).sum();
                g * self.gate * (self.base_weight * dsilu + self.spline_weight * dspline)
            }
            None => 0.0,
        }
    }
}

/// `n -> H -> 1` Kolmogorov-Arnold network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KanNetwork {
    input_dim: usize,
    hidden_width: usize,
    /// Grid shared by all input-layer edges.
    inner_grid: SplineGrid,
    /// One grid per hidden node, used by that node's output edge.
    outer_grids: Vec<SplineGrid>,
    /// Input-layer edges, row-major by hidden node: `inner[p * n + q]`.
    inner: Vec<EdgeActivation>,
    hidden_bias: Vec<f64>,
    outer: Vec<EdgeActivation>,
    output_bias: f64,
    seed: u64,
    train_config: TrainConfig,
}

/// Intermediate values of one forward pass, reused across samples.
struct Scratch {
    inner_basis: Vec<f64>,
    inner_silu: Vec<f64>,
    hidden: Vec<f64>,
    outer_basis: Vec<f64>,
    outer_dbasis: Vec<f64>,
    outer_silu: Vec<f64>,
    outer_dsilu: Vec<f64>,
    knots: Vec<f64>,
}

impl KanNetwork {
    /// Builds a network with the default `2n + 1` hidden width.
    pub fn new(
        n: usize,
        grid_count: usize,
        degree: usize,
        grid_range: (f64, f64),
        seed: u64,
    ) -> Result<Self> {
        let cfg = KanConfig {
            grid_count,
            degree,
            grid_range,
            ..KanConfig::default()
        };
        Self::from_config(n, &cfg, seed)
    }

    pub fn from_config(n: usize, cfg: &KanConfig, seed: u64) -> Result<Self> {
        if n == 0 {
            return config("KAN input dimension must be >= 1");
        }
        let hidden = cfg.hidden_width.unwrap_or(2 * n + 1);
        if hidden == 0 {
            return config("KAN hidden width must be >= 1");
        }
        cfg.train.validate()?;
        let inner_grid =
            SplineGrid::new(cfg.grid_count, cfg.degree, cfg.grid_range.0, cfg.grid_range.1)?;
        let outer_grid = SplineGrid::new(cfg.grid_count, cfg.degree, -1.0, 1.0)?;
        let nb = inner_grid.num_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, INIT_COEF_STD).expect("valid std");
        let inner = (0..hidden * n)
            .map(|_| EdgeActivation::random(nb, &mut rng, &normal))
            .collect();
        let outer = (0..hidden)
            .map(|_| EdgeActivation::random(nb, &mut rng, &normal))
            .collect();
        Ok(Self {
            input_dim: n,
            hidden_width: hidden,
            inner_grid,
            outer_grids: vec![outer_grid; hidden],
            inner,
            hidden_bias: vec![0.0; hidden],
            outer,
            output_bias: 0.0,
            seed,
            train_config: cfg.train.clone(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden_width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn train_config(&self) -> &TrainConfig {
        &self.train_config
    }

    pub fn set_train_config(&mut self, cfg: TrainConfig) {
        self.train_config = cfg;
    }

    pub fn inner_grid(&self) -> &SplineGrid {
        &self.inner_grid
    }

    pub fn outer_grids(&self) -> &[SplineGrid] {
        &self.outer_grids
    }

    /// Input-layer edge from input `q` to hidden node `p`.
    pub fn inner_edge(&self, p: usize, q: usize) -> &EdgeActivation {
        &self.inner[p * self.input_dim + q]
    }

    pub fn outer_edge(&self, p: usize) -> &EdgeActivation {
        &self.outer[p]
    }

    /// Mutable access to every edge, input layer first.
    pub fn edges_mut(&mut self) -> impl Iterator<Item = &mut EdgeActivation> {
        self.inner.iter_mut().chain(self.outer.iter_mut())
    }

    /// Counts parameters by walking the allocated structure.
    pub fn allocated_params(&self) -> usize {
        let edges: usize = self
            .inner
            .iter()
            .chain(&self.outer)
            .map(|e| e.coefficients.len() + 3)
            .sum();
        edges + self.hidden_bias.len() + 1
    }

    /// Checks structural consistency, e.g. after loading from JSON.
    pub fn validate(&self) -> Result<()> {
        let nb = self.inner_grid.num_basis();
        self.inner_grid.validate()?;
        let ok = self.input_dim >= 1
            && self.inner.len() == self.input_dim * self.hidden_width
            && self.outer.len() == self.hidden_width
            && self.outer_grids.len() == self.hidden_width
            && self.hidden_bias.len() == self.hidden_width
            && self
                .inner
                .iter()
                .chain(&self.outer)
                .all(|e| e.coefficients.len() == nb)
            && self
                .outer_grids
                .iter()
                .all(|g| g.num_basis() == nb && g.validate().is_ok());
        if ok {
            Ok(())
        } else {
            config("KAN document has inconsistent dimensions")
        }
    }

    fn scratch(&self) -> Scratch {
        let nb = self.inner_grid.num_basis();
        let h = self.hidden_width;
        Scratch {
            inner_basis: vec![0.0; self.input_dim * nb],
            inner_silu: vec![0.0; self.input_dim],
            hidden: vec![0.0; h],
            outer_basis: vec![0.0; h * nb],
            outer_dbasis: vec![0.0; h * nb],
            outer_silu: vec![0.0; h],
            outer_dsilu: vec![0.0; h],
            knots: vec![0.0; self.inner_grid.knots().len()],
        }
    }

    fn hidden_pass(&self, x: &[f64], s: &mut Scratch) {
        let nb = self.inner_grid.num_basis();
        for (q, &xq) in x.iter().enumerate() {
            self.inner_grid
                .basis_into(xq, &mut s.inner_basis[q * nb..(q + 1) * nb], None, &mut s.knots);
            s.inner_silu[q] = crate::util::silu(xq);
        }
        for p in 0..self.hidden_width {
            let mut h = self.hidden_bias[p];
            for q in 0..self.input_dim {
                let e = &self.inner[p * self.input_dim + q];
                h += e.eval(&s.inner_basis[q * nb..(q + 1) * nb], s.inner_silu[q]);
            }
            s.hidden[p] = h;
        }
    }

    fn forward_scratch(&self, x: &[f64], s: &mut Scratch, with_deriv: bool) -> f64 {
        self.hidden_pass(x, s);
        let nb = self.inner_grid.num_basis();
        let mut y = self.output_bias;
        for p in 0..self.hidden_width {
            let h = s.hidden[p];
            let basis = &mut s.outer_basis[p * nb..(p + 1) * nb];
            let dbasis = if with_deriv {
                Some(&mut s.outer_dbasis[p * nb..(p + 1) * nb])
            } else {
                None
            };
            self.outer_grids[p].basis_into(h, basis, dbasis, &mut s.knots);
            let (sv, ds) = silu_and_grad(h);
            s.outer_silu[p] = sv;
            s.outer_dsilu[p] = ds;
            y += self.outer[p].eval(basis, sv);
        }
        y
    }

    /// Evaluates the network at `x`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return input(format!(
                "expected {} inputs, got {}",
                self.input_dim,
                x.len()
            ));
        }
        Ok(self.forward_scratch(x, &mut self.scratch(), false))
    }

    /// Hidden-node pre-activation sums at `x`.
    pub fn hidden_sums(&self, x: &[f64]) -> Vec<f64> {
        let mut s = self.scratch();
        self.hidden_pass(x, &mut s);
        s.hidden
    }

    /// Resets each output-edge grid to the observed range of its hidden sum,
    /// padded by 10% of the span on both sides.
    pub fn adapt_grids(&mut self, xs: &[&[f64]]) -> Result<()> {
        if xs.is_empty() {
            return input("grid adaptation needs data");
        }
        let h = self.hidden_width;
        let mut lo = vec![f64::INFINITY; h];
        let mut hi = vec![f64::NEG_INFINITY; h];
        let mut s = self.scratch();
        for x in xs {
            if x.len() != self.input_dim {
                return input("dimension mismatch in grid adaptation data");
            }
            self.hidden_pass(x, &mut s);
            for p in 0..h {
                lo[p] = lo[p].min(s.hidden[p]);
                hi[p] = hi[p].max(s.hidden[p]);
            }
        }
        let (g, k) = (self.inner_grid.grid_count(), self.inner_grid.degree());
        for p in 0..h {
            let (a, b) = padded_range(lo[p], hi[p]);
            self.outer_grids[p] = SplineGrid::new(g, k, a, b)?;
        }
        Ok(())
    }

    /// Adapts the output grids once, then trains for `epochs` passes.
    pub fn train(&mut self, xs: &[&[f64]], ys: &[f64], epochs: usize) -> Result<Vec<f64>> {
        if epochs == 0 {
            return config("epochs must be >= 1");
        }
        if xs.is_empty() {
            return input("training data is empty");
        }
        self.adapt_grids(xs)?;
        let cfg = TrainConfig {
            epochs,
            ..self.train_config.clone()
        };
        train(self, xs, ys, &cfg, mix_seed(self.seed, 1))
    }

    /// Trains with the stored epoch count.
    pub fn fit(&mut self, xs: &[&[f64]], ys: &[f64]) -> Result<Vec<f64>> {
        let epochs = self.train_config.epochs;
        self.train(xs, ys, epochs)
    }

    fn edge_stride(&self) -> usize {
        self.inner_grid.num_basis() + 3
    }
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if !(span > 1e-12 * (1.0 + lo.abs().max(hi.abs()))) {
        let mid = 0.5 * (lo + hi);
        return (mid - 0.5, mid + 0.5);
    }
    (lo - GRID_PADDING * span, hi + GRID_PADDING * span)
}

impl Trainable for KanNetwork {
    fn num_params(&self) -> usize {
        kan_param_count_with_width(
            self.input_dim,
            self.hidden_width,
            self.inner_grid.grid_count(),
            self.inner_grid.degree(),
        )
    }

    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(usize, &mut f64)) {
        let mut off = 0;
        for e in &mut self.inner {
            e.for_each_param_mut(&mut off, f);
        }
        for b in &mut self.hidden_bias {
            f(off, b);
            off += 1;
        }
        for e in &mut self.outer {
            e.for_each_param_mut(&mut off, f);
        }
        f(off, &mut self.output_bias);
    }

    fn accumulate_grad(&self, xs: &[&[f64]], ys: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let n = self.input_dim;
        let h = self.hidden_width;
        let nb = self.inner_grid.num_basis();
        let stride = self.edge_stride();
        let bias_off = h * n * stride;
        let outer_off = bias_off + h;
        let out_bias = outer_off + h * stride;
        let mut s = self.scratch();
        let mut sse = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let pred = self.forward_scratch(x, &mut s, true);
            let r = pred - y;
            sse += r * r;
            let dy = 2.0 * r * scale;
            grad[out_bias] += dy;
            for p in 0..h {
                let off = outer_off + p * stride;
                let dh = self.outer[p].backward(
                    &s.outer_basis[p * nb..(p + 1) * nb],
                    Some(&s.outer_dbasis[p * nb..(p + 1) * nb]),
                    s.outer_silu[p],
                    s.outer_dsilu[p],
                    dy,
                    &mut grad[off..off + stride],
                );
                grad[bias_off + p] += dh;
                for q in 0..n {
                    let e = p * n + q;
                    let off = e * stride;
                    self.inner[e].backward(
                        &s.inner_basis[q * nb..(q + 1) * nb],
                        None,
                        s.inner_silu[q],
                        0.0,
                        dh,
                        &mut grad[off..off + stride],
                    );
                }
            }
        }
        sse
    }
}

impl Regressor for KanNetwork {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        self.forward_scratch(x, &mut self.scratch(), false)
    }

    fn predict_many(&self, xs: &[&[f64]]) -> Vec<f64> {
        let mut s = self.scratch();
        xs.iter()
            .map(|x| self.forward_scratch(x, &mut s, false))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::silu;

    fn rows(data: &[Vec<f64>]) -> Vec<&[f64]> {
        data.iter().map(|r| r.as_slice()).collect()
    }

    #[test]
    fn param_counts() {
        assert_eq!(kan_param_count(2, 3, 3), 141);
        assert_eq!(kan_param_count(1, 3, 3), 58);
        assert_eq!(kan_param_count(5, 3, 3), 606);
        assert_eq!(kan_param_count(8, 3, 3), 1395);
        for n in [1, 2, 5, 8] {
            let net = KanNetwork::new(n, 3, 3, (0.0, 1.0), 0).unwrap();
            assert_eq!(net.allocated_params(), kan_param_count(n, 3, 3));
            assert_eq!(net.num_params(), kan_param_count(n, 3, 3));
            let mut visited = 0;
            let mut net = net;
            net.for_each_param_mut(&mut |i, _| {
                assert_eq!(i, visited);
                visited += 1;
            });
            assert_eq!(visited, kan_param_count(n, 3, 3));
        }
    }

    #[test]
    fn init_is_seed_deterministic() {
        let a = KanNetwork::new(2, 3, 3, (0.0, 1.0), 9).unwrap();
        let b = KanNetwork::new(2, 3, 3, (0.0, 1.0), 9).unwrap();
        let c = KanNetwork::new(2, 3, 3, (0.0, 1.0), 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.inner_edge(0, 0).base_weight, 1.0);
        assert_eq!(a.outer_edge(4).spline_weight, 1.0);
        assert_eq!(a.outer_grids()[0].range(), (-1.0, 1.0));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(KanNetwork::new(0, 3, 3, (0.0, 1.0), 0).is_err());
        assert!(KanNetwork::new(2, 0, 3, (0.0, 1.0), 0).is_err());
        assert!(KanNetwork::new(2, 3, 0, (0.0, 1.0), 0).is_err());
        let net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 0).unwrap();
        assert!(net.forward(&[0.1]).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let mut net = KanNetwork::new(3, 3, 3, (0.0, 1.0), 1).unwrap();
        for e in net.edges_mut() {
            e.coefficients.iter_mut().for_each(|c| *c = 0.0);
            e.base_weight = 0.0;
        }
        assert_eq!(net.forward(&[0.2, 0.9, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn pure_silu_network_matches_hand_evaluation() {
        let mut net = KanNetwork::new(1, 3, 3, (0.0, 1.0), 1).unwrap();
        for e in net.edges_mut() {
            e.spline_weight = 0.0;
        }
        // n = 1, three hidden nodes each computing silu(silu(x)).
        let x: f64 = 0.3;
        let s1 = x / (1.0 + (-x).exp());
        let s2 = s1 / (1.0 + (-s1).exp());
        let expected = 3.0 * s2;
        assert!((net.forward(&[x]).unwrap() - expected).abs() < 1e-15);
        assert!((silu(x) - s1).abs() < 1e-16);
    }

    #[test]
    fn forward_is_pure() {
        let net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 4).unwrap();
        let a = net.forward(&[0.25, 0.75]).unwrap();
        let b = net.forward(&[0.25, 0.75]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn zero_residual_has_zero_gradient() {
        let net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 2).unwrap();
        let data = vec![vec![0.1, 0.2], vec![0.7, 0.4]];
        let xs = rows(&data);
        let ys: Vec<f64> = xs.iter().map(|x| net.forward(x).unwrap()).collect();
        let (loss, g) = net.mse_grad(&xs, &ys).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.iter().all(|v| v.abs() < 1e-12));
        assert!(net.mse_grad(&[], &[]).is_err());
    }

    #[test]
    fn doubling_residual_doubles_output_edge_gradient() {
        let net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 3).unwrap();
        let x = [0.4, 0.6];
        let y = net.forward(&x).unwrap();
        let (_, g1) = net.mse_grad(&[&x], &[y - 0.5]).unwrap();
        let (_, g2) = net.mse_grad(&[&x], &[y - 1.0]).unwrap();
        let stride = net.edge_stride();
        let outer_off = 5 * 2 * stride + 5;
        for p in 0..5 {
            let ws = outer_off + p * stride + 6 + 1;
            assert!((g2[ws] - 2.0 * g1[ws]).abs() < 1e-12 * (1.0 + g1[ws].abs()));
        }
    }

    #[test]
    fn adapt_grids_pads_ranges() {
        assert_eq!(padded_range(-0.5, 0.5), (-0.6, 0.6));
        assert_eq!(padded_range(0.3, 0.3), (-0.2, 0.8));
        let mut net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 5).unwrap();
        let data: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 / 19.0, (i * 7 % 20) as f64 / 19.0])
            .collect();
        let xs = rows(&data);
        net.adapt_grids(&xs).unwrap();
        let first = net.outer_grids().to_vec();
        let sums: Vec<Vec<f64>> = xs.iter().map(|x| net.hidden_sums(x)).collect();
        for (p, g) in first.iter().enumerate() {
            let lo = sums.iter().map(|s| s[p]).fold(f64::INFINITY, f64::min);
            let hi = sums.iter().map(|s| s[p]).fold(f64::NEG_INFINITY, f64::max);
            let (a, b) = g.range();
            assert!((a - (lo - 0.1 * (hi - lo))).abs() < 1e-12);
            assert!((b - (hi + 0.1 * (hi - lo))).abs() < 1e-12);
        }
        assert_eq!(net.inner_grid().range(), (0.0, 1.0));
        net.adapt_grids(&xs).unwrap();
        assert_eq!(net.outer_grids(), first.as_slice());
    }

    #[test]
    fn constant_target_is_learned() {
        let data: Vec<Vec<f64>> = (0..500)
            .map(|i| vec![(i % 25) as f64 / 24.0, (i / 25) as f64 / 19.0])
            .collect();
        let xs = rows(&data);
        let ys = vec![0.3; xs.len()];
        let mut net = KanNetwork::new(2, 3, 3, (0.0, 1.0), 11).unwrap();
        let hist = net.train(&xs, &ys, 10).unwrap();
        assert_eq!(hist.len(), 10);
        let mae: f64 = xs
            .iter()
            .map(|x| (net.predict(x) - 0.3).abs())
            .sum::<f64>()
            / xs.len() as f64;
        assert!(mae < 0.05, "mae {mae}");
        assert!(net.train(&xs, &ys, 0).is_err());
        let mut again = KanNetwork::new(2, 3, 3, (0.0, 1.0), 11).unwrap();
        assert_eq!(again.train(&xs, &ys, 10).unwrap(), hist);
        assert_eq!(again, net);
    }
}
