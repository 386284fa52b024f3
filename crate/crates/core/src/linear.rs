//! Batch least-squares linear consequent.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::model::Regressor;

/// Diagonal damping added to the Gram matrix.
pub const RIDGE: f64 = 1e-8;
const REFINEMENT_SWEEPS: usize = 2;

/// `y = w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, intercept: f64) -> Self {
        Self { weights, intercept }
    }

    /// Least-squares fit through damped normal equations.
    ///
    /// The damped system `(X^T X + lambda I) theta = X^T y` is solved by
    /// Cholesky factorization and then polished with a couple of iterative
    /// refinement sweeps against the undamped equations, so full-rank fits
    /// are exact to rounding while rank-deficient ones stay in the row space.
    pub fn fit(xs: &[&[f64]], ys: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return input("linear fit needs at least one point");
        }
        if xs.len() != ys.len() {
            return input("feature/target length mismatch");
        }
        let n = xs[0].len();
        if xs.iter().any(|x| x.len() != n) {
            return input("ragged feature rows");
        }
        let d = n + 1;
        let mut gram = DMatrix::<f64>::zeros(d, d);
        let mut rhs = DVector::<f64>::zeros(d);
        let mut row = vec![1.0; d];
        for (x, &y) in xs.iter().zip(ys) {
            row[..n].copy_from_slice(x);
            for i in 0..d {
                rhs[i] += row[i] * y;
                for j in i..d {
                    gram[(i, j)] += row[i] * row[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        let mut damped = gram.clone();
        for i in 0..d {
            damped[(i, i)] += RIDGE;
        }
        let chol = damped
            .cholesky()
            .expect("damped Gram matrix is positive definite");
        let mut theta = chol.solve(&rhs);
        for _ in 0..REFINEMENT_SWEEPS {
            let residual = &rhs - &gram * &theta;
            theta += chol.solve(&residual);
        }
        Ok(Self {
            weights: theta.as_slice()[..n].to_vec(),
            intercept: theta[n],
        })
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return input(format!(
                "expected {} inputs, got {}",
                self.weights.len(),
                x.len()
            ));
        }
        Ok(self.predict(x))
    }
}

impl Regressor for LinearModel {
    fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sse(m: &LinearModel, xs: &[&[f64]], ys: &[f64]) -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| (m.predict(x) - y).powi(2))
            .sum()
    }

    #[test]
    fn exact_line() {
        let data = [[0.0], [0.5], [1.0]];
        let xs: Vec<&[f64]> = data.iter().map(|r| r.as_slice()).collect();
        let ys: Vec<f64> = data.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        let m = LinearModel::fit(&xs, &ys).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-9);
        assert!((m.intercept - 1.0).abs() < 1e-9);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((m.predict(x) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn single_point_is_interpolated() {
        let x = [0.3, 0.7];
        let m = LinearModel::fit(&[&x], &[0.42]).unwrap();
        assert!((m.predict(&x) - 0.42).abs() < 1e-6);
        assert!(LinearModel::fit(&[], &[]).is_err());
    }

    #[test]
    fn constant_and_simple_predictions() {
        let m = LinearModel::new(vec![0.0, 0.0], 0.7);
        assert_eq!(m.forward(&[0.1, 0.9]).unwrap(), 0.7);
        let m = LinearModel::new(vec![1.0, 1.0], 0.0);
        assert_eq!(m.forward(&[0.25, 0.5]).unwrap(), 0.75);
        assert!(m.forward(&[0.25]).is_err());
    }

    #[test]
    fn beats_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let data: Vec<[f64; 2]> = (0..50).map(|_| [rng.random(), rng.random()]).collect();
        let xs: Vec<&[f64]> = data.iter().map(|r| r.as_slice()).collect();
        let ys: Vec<f64> = data
            .iter()
            .map(|r| 0.3 * r[0] - 1.2 * r[1] + 0.5 + rng.random_range(-0.2..0.2))
            .collect();
        let best = LinearModel::fit(&xs, &ys).unwrap();
        let base = sse(&best, &xs, &ys);
        for _ in 0..100 {
            let cand = LinearModel::new(
                best.weights
                    .iter()
                    .map(|w| w + rng.random_range(-0.1..0.1))
                    .collect(),
                best.intercept + rng.random_range(-0.1..0.1),
            );
            assert!(base <= sse(&cand, &xs, &ys));
        }
    }

    #[test]
    fn exactly_linear_data_in_eight_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let data: Vec<Vec<f64>> = (0..1000)
            .map(|_| (0..8).map(|_| rng.random()).collect())
            .collect();
        let xs: Vec<&[f64]> = data.iter().map(|r| r.as_slice()).collect();
        let ys: Vec<f64> = data
            .iter()
            .map(|r| 0.25 + r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let m = LinearModel::fit(&xs, &ys).unwrap();
        assert!(sse(&m, &xs, &ys).sqrt() < 1e-9);
    }

    proptest! {
        #[test]
        fn prediction_is_affine(
            w in prop::collection::vec(-3.0f64..3.0, 3),
            b in -2.0f64..2.0,
            x1 in prop::collection::vec(0.0f64..1.0, 3),
            x2 in prop::collection::vec(0.0f64..1.0, 3),
            a in 0.0f64..1.0,
        ) {
            let m = LinearModel::new(w, b);
            let mix: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| a * p + (1.0 - a) * q).collect();
            let lhs = m.predict(&mix);
            let rhs = a * m.predict(&x1) + (1.0 - a) * m.predict(&x2);
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
