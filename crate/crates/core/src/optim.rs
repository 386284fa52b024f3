//! Gradient-based training shared by the neural consequents: minibatch Adam
//! and full-batch L-BFGS with a strong-Wolfe line search.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, input, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Shuffled minibatches of `batch_size`; one epoch is one pass.
    Adam,
    /// Full batch; one epoch is up to `max_iter` quasi-Newton iterations.
    Lbfgs,
}

/// Optimizer settings for gradient-trained networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub history_size: usize,
    pub max_iter: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::Lbfgs,
            learning_rate: 1.0,
            epochs: 10,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 64,
            history_size: 10,
            max_iter: 20,
        }
    }
}

impl TrainConfig {
    /// Minibatch Adam with step size 0.01 and batches of 64.
    pub fn adam() -> Self {
        Self {
            optimizer: Optimizer::Adam,
            learning_rate: 0.01,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return config("epochs must be >= 1");
        }
        if !(self.learning_rate > 0.0) {
            return config("learning rate must be positive");
        }
        match self.optimizer {
            Optimizer::Adam => {
                if self.batch_size == 0 {
                    return config("batch size must be >= 1");
                }
                if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
                    return config("Adam decay rates must lie in [0, 1)");
                }
            }
            Optimizer::Lbfgs => {
                if self.history_size == 0 || self.max_iter == 0 {
                    return config("L-BFGS history size and iterations must be >= 1");
                }
            }
        }
        Ok(())
    }
}

/// A model with a flat parameter vector and an MSE gradient.
pub trait Trainable {
    fn num_params(&self) -> usize;

    /// Applies `f(index, param)` to every learnable parameter in gradient order.
    fn for_each_param_mut(&mut self, f: &mut dyn FnMut(usize, &mut f64));

    /// Adds the gradient of `sum (pred - y)^2 * scale` into `grad` and returns
    /// the summed squared error over the batch.
    fn accumulate_grad(&self, xs: &[&[f64]], ys: &[f64], scale: f64, grad: &mut [f64]) -> f64;

    /// Mean-squared-error gradient over a batch.
    fn mse_grad(&self, xs: &[&[f64]], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
        if xs.is_empty() {
            return input("gradient needs a non-empty batch");
        }
        if xs.len() != ys.len() {
            return input("feature/target length mismatch");
        }
        let mut grad = vec![0.0; self.num_params()];
        let m = xs.len() as f64;
        let sse = self.accumulate_grad(xs, ys, 1.0 / m, &mut grad);
        Ok((sse / m, grad))
    }

    fn params(&mut self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_params()];
        self.for_each_param_mut(&mut |i, p| out[i] = *p);
        out
    }

    fn set_params(&mut self, values: &[f64]) {
        self.for_each_param_mut(&mut |i, p| *p = values[i]);
    }
}

/// Trains with the configured optimizer and returns one loss per epoch.
pub fn train<T: Trainable + ?Sized>(
    model: &mut T,
    xs: &[&[f64]],
    ys: &[f64],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if xs.is_empty() {
        return input("training data is empty");
    }
    if xs.len() != ys.len() {
        return input("feature/target length mismatch");
    }
    match cfg.optimizer {
        Optimizer::Adam => Ok(train_adam(model, xs, ys, cfg, seed)),
        Optimizer::Lbfgs => Ok(train_lbfgs(model, xs, ys, cfg)),
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn apply<T: Trainable + ?Sized>(&mut self, model: &mut T, grad: &[f64], cfg: &TrainConfig) {
        self.step += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.step);
        let bc2 = 1.0 - cfg.beta2.powi(self.step);
        let (m, v) = (&mut self.m, &mut self.v);
        model.for_each_param_mut(&mut |i, p| {
            let g = grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            let mhat = m[i] / bc1;
            let vhat = v[i] / bc2;
            *p -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.eps);
        });
    }
}

/// Mean training loss of each epoch, accumulated before each update.
fn train_adam<T: Trainable + ?Sized>(
    model: &mut T,
    xs: &[&[f64]],
    ys: &[f64],
    cfg: &TrainConfig,
    seed: u64,
) -> Vec<f64> {
    let n = model.num_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut adam = Adam {
        m: vec![0.0; n],
        v: vec![0.0; n],
        step: 0,
    };
    let mut grad = vec![0.0; n];
    let mut bx: Vec<&[f64]> = Vec::with_capacity(cfg.batch_size);
    let mut by: Vec<f64> = Vec::with_capacity(cfg.batch_size);
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sse = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            bx.clear();
            by.clear();
            for &i in chunk {
                bx.push(xs[i]);
                by.push(ys[i]);
            }
            grad.iter_mut().for_each(|g| *g = 0.0);
            sse += model.accumulate_grad(&bx, &by, 1.0 / chunk.len() as f64, &mut grad);
            adam.apply(model, &grad, cfg);
        }
        history.push(sse / xs.len() as f64);
    }
    history
}

const TOLERANCE_GRAD: f64 = 1e-32;
const TOLERANCE_CHANGE: f64 = 1e-32;
const WOLFE_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;
const MAX_LINE_SEARCH: usize = 25;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Full-batch mean squared error and its gradient at given parameters.
struct Objective<'a, T: ?Sized> {
    model: &'a mut T,
    xs: &'a [&'a [f64]],
    ys: &'a [f64],
    evals: usize,
}

impl<T: Trainable + ?Sized> Objective<'_, T> {
    fn eval_current(&mut self) -> (f64, Vec<f64>) {
        self.evals += 1;
        let mut grad = vec![0.0; self.model.num_params()];
        let m = self.xs.len() as f64;
        let sse = self.model.accumulate_grad(self.xs, self.ys, 1.0 / m, &mut grad);
        (sse / m, grad)
    }

    fn eval_at(&mut self, x: &[f64], t: f64, d: &[f64]) -> (f64, Vec<f64>) {
        let moved: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
        self.model.set_params(&moved);
        self.eval_current()
    }
}

/// Minimizer of the cubic interpolating two points with slopes, clamped to
/// `bounds` (default: the interval between the points).
fn cubic_interpolate(
    (x1, f1, g1): (f64, f64, f64),
    (x2, f2, g2): (f64, f64, f64),
    bounds: Option<(f64, f64)>,
) -> f64 {
    let (lo, hi) = bounds.unwrap_or(if x1 <= x2 { (x1, x2) } else { (x2, x1) });
    let d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    let d2_square = d1 * d1 - g1 * g2;
    if d2_square >= 0.0 {
        let d2 = d2_square.sqrt();
        let min_pos = if x1 <= x2 {
            x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
        } else {
            x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2))
        };
        min_pos.max(lo).min(hi)
    } else {
        (lo + hi) / 2.0
    }
}

#[derive(Clone)]
struct Point {
    t: f64,
    f: f64,
    g: Vec<f64>,
    gtd: f64,
}

/// Strong-Wolfe line search along `d` from `x` (bracketing then zoom).
/// Returns the accepted point; parameters are left at `x`.
fn strong_wolfe<T: Trainable + ?Sized>(
    obj: &mut Objective<'_, T>,
    x: &[f64],
    t0: f64,
    d: &[f64],
    f: f64,
    g: &[f64],
    gtd: f64,
) -> Point {
    let d_norm = max_abs(d);
    let mut t = t0;
    let (mut f_new, mut g_new) = obj.eval_at(x, t, d);
    let mut gtd_new = dot(&g_new, d);
    let mut prev = Point {
        t: 0.0,
        f,
        g: g.to_vec(),
        gtd,
    };
    let mut done = false;
    let mut ls_iter = 0;
    let mut bracket: Vec<Point> = Vec::new();
    while ls_iter < MAX_LINE_SEARCH {
        let cur = Point {
            t,
            f: f_new,
            g: g_new.clone(),
            gtd: gtd_new,
        };
        if f_new > f + WOLFE_C1 * t * gtd || (ls_iter > 1 && f_new >= prev.f) {
            bracket = vec![prev, cur];
            break;
        }
        if gtd_new.abs() <= -WOLFE_C2 * gtd {
            bracket = vec![cur];
            done = true;
            break;
        }
        if gtd_new >= 0.0 {
            bracket = vec![prev, cur];
            break;
        }
        let min_step = t + 0.01 * (t - prev.t);
        let max_step = t * 10.0;
        t = cubic_interpolate(
            (prev.t, prev.f, prev.gtd),
            (t, f_new, gtd_new),
            Some((min_step, max_step)),
        );
        prev = cur;
        (f_new, g_new) = obj.eval_at(x, t, d);
        gtd_new = dot(&g_new, d);
        ls_iter += 1;
    }
    if ls_iter == MAX_LINE_SEARCH {
        bracket = vec![
            Point {
                t: 0.0,
                f,
                g: g.to_vec(),
                gtd,
            },
            Point {
                t,
                f: f_new,
                g: g_new,
                gtd: gtd_new,
            },
        ];
    }

    let order = |b: &[Point]| if b[0].f <= b[b.len() - 1].f { (0, 1) } else { (1, 0) };
    let (mut low, mut high) = order(&bracket);
    let mut insufficient = false;
    while !done && ls_iter < MAX_LINE_SEARCH {
        if (bracket[1].t - bracket[0].t).abs() * d_norm < TOLERANCE_CHANGE {
            break;
        }
        let mut t = cubic_interpolate(
            (bracket[0].t, bracket[0].f, bracket[0].gtd),
            (bracket[1].t, bracket[1].f, bracket[1].gtd),
            None,
        );
        let b_max = bracket[0].t.max(bracket[1].t);
        let b_min = bracket[0].t.min(bracket[1].t);
        let eps = 0.1 * (b_max - b_min);
        if (b_max - t).min(t - b_min) < eps {
            if insufficient || t >= b_max || t <= b_min {
                t = if (t - b_max).abs() < (t - b_min).abs() {
                    b_max - eps
                } else {
                    b_min + eps
                };
                insufficient = false;
            } else {
                insufficient = true;
            }
        } else {
            insufficient = false;
        }
        let (f_new, g_new) = obj.eval_at(x, t, d);
        let gtd_new = dot(&g_new, d);
        ls_iter += 1;
        let cur = Point {
            t,
            f: f_new,
            g: g_new,
            gtd: gtd_new,
        };
        if f_new > f + WOLFE_C1 * t * gtd || f_new >= bracket[low].f {
            bracket[high] = cur;
            (low, high) = order(&bracket);
        } else {
            if gtd_new.abs() <= -WOLFE_C2 * gtd {
                done = true;
            } else if gtd_new * (bracket[high].t - bracket[low].t) >= 0.0 {
                bracket[high] = bracket[low].clone();
            }
            bracket[low] = cur;
        }
    }
    obj.model.set_params(x);
    bracket.swap_remove(low)
}

/// Full-batch L-BFGS; each epoch runs up to `max_iter` iterations (and
/// `max_iter * 5 / 4` function evaluations) while curvature history carries
/// over between epochs. Returns the loss after each epoch.
fn train_lbfgs<T: Trainable + ?Sized>(
    model: &mut T,
    xs: &[&[f64]],
    ys: &[f64],
    cfg: &TrainConfig,
) -> Vec<f64> {
    let lr = cfg.learning_rate;
    let max_eval = cfg.max_iter * 5 / 4;
    let mut obj = Objective {
        model,
        xs,
        ys,
        evals: 0,
    };
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut old_dirs: Vec<Vec<f64>> = Vec::new();
    let mut old_steps: Vec<Vec<f64>> = Vec::new();
    let mut rho: Vec<f64> = Vec::new();
    let mut h_diag = 1.0;
    let mut d: Vec<f64> = Vec::new();
    let mut t = lr;
    let mut prev_grad: Vec<f64> = Vec::new();
    let mut total_iter = 0usize;
    let mut best = (f64::INFINITY, obj.model.params());

    for _ in 0..cfg.epochs {
        obj.evals = 0;
        let (mut loss, mut grad) = obj.eval_current();
        if loss.is_finite() && loss < best.0 {
            best = (loss, obj.model.params());
        }
        if !loss.is_finite() || max_abs(&grad) <= TOLERANCE_GRAD {
            history.push(loss);
            continue;
        }
        let mut n_iter = 0;
        while n_iter < cfg.max_iter {
            n_iter += 1;
            total_iter += 1;
            if total_iter == 1 {
                d = grad.iter().map(|g| -g).collect();
                old_dirs.clear();
                old_steps.clear();
                rho.clear();
                h_diag = 1.0;
            } else {
                let y: Vec<f64> = grad.iter().zip(&prev_grad).map(|(a, b)| a - b).collect();
                let s: Vec<f64> = d.iter().map(|v| v * t).collect();
                let ys = dot(&y, &s);
                if ys > 1e-10 {
                    if old_dirs.len() == cfg.history_size {
                        old_dirs.remove(0);
                        old_steps.remove(0);
                        rho.remove(0);
                    }
                    h_diag = ys / dot(&y, &y);
                    old_dirs.push(y);
                    old_steps.push(s);
                    rho.push(1.0 / ys);
                }
                // two-loop recursion
                let k = old_dirs.len();
                let mut q: Vec<f64> = grad.iter().map(|g| -g).collect();
                let mut alpha = vec![0.0; k];
                for i in (0..k).rev() {
                    alpha[i] = dot(&old_steps[i], &q) * rho[i];
                    for (qj, yj) in q.iter_mut().zip(&old_dirs[i]) {
                        *qj -= alpha[i] * yj;
                    }
                }
                let mut r: Vec<f64> = q.iter().map(|v| v * h_diag).collect();
                for i in 0..k {
                    let beta = dot(&old_dirs[i], &r) * rho[i];
                    for (rj, sj) in r.iter_mut().zip(&old_steps[i]) {
                        *rj += sj * (alpha[i] - beta);
                    }
                }
                d = r;
            }
            prev_grad.clone_from(&grad);
            let prev_loss = loss;
            t = if total_iter == 1 {
                (1.0 / grad.iter().map(|g| g.abs()).sum::<f64>()).min(1.0) * lr
            } else {
                lr
            };
            let gtd = dot(&grad, &d);
            if gtd > -TOLERANCE_CHANGE {
                break;
            }
            let x = obj.model.params();
            let accepted = strong_wolfe(&mut obj, &x, t, &d, loss, &grad, gtd);
            t = accepted.t;
            loss = accepted.f;
            grad = accepted.g;
            let moved: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            obj.model.set_params(&moved);
            if !loss.is_finite() {
                break;
            }
            if loss < best.0 {
                best = (loss, moved);
            }
            if n_iter == cfg.max_iter
                || obj.evals >= max_eval
                || max_abs(&grad) <= TOLERANCE_GRAD
                || max_abs(&d) * t.abs() <= TOLERANCE_CHANGE
                || (loss - prev_loss).abs() < TOLERANCE_CHANGE
            {
                break;
            }
        }
        history.push(loss);
    }
    let final_loss = history.last().copied().unwrap_or(f64::NAN);
    if !final_loss.is_finite() && best.0.is_finite() {
        obj.model.set_params(&best.1);
        if let Some(last) = history.last_mut() {
            *last = best.0;
        }
    }
    history
}
