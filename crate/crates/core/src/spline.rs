//! Uniform B-spline grids and Cox–de Boor basis evaluation.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Knot vector for `grid_count` uniform intervals over `[lo, hi]`, extended by
/// `degree` knots on each side with the same spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineGrid {
    degree: usize,
    grid_count: usize,
    lo: f64,
    hi: f64,
    knots: Vec<f64>,
}

impl SplineGrid {
    pub fn new(grid_count: usize, degree: usize, lo: f64, hi: f64) -> Result<Self> {
        if grid_count == 0 || degree == 0 {
            return config(format!(
                "spline grid needs G >= 1 and K >= 1 (got G={grid_count}, K={degree})"
            ));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return config(format!("spline range [{lo}, {hi}] is not a proper interval"));
        }
        let h = (hi - lo) / grid_count as f64;
        let k = degree as isize;
        let knots = (-k..=grid_count as isize + k)
            .map(|i| {
                if i == grid_count as isize {
                    hi
                } else {
                    lo + i as f64 * h
                }
            })
            .collect();
        Ok(Self {
            degree,
            grid_count,
            lo,
            hi,
            knots,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid_count(&self) -> usize {
        self.grid_count
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions, `G + K`.
    pub fn num_basis(&self) -> usize {
        self.grid_count + self.degree
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = SplineGrid::new(self.grid_count, self.degree, self.lo, self.hi)?;
        if rebuilt.knots.len() != self.knots.len()
            || self.knots.windows(2).any(|w| !(w[0] < w[1]))
        {
            return config("knot vector is not strictly increasing with G + 2K + 1 entries");
        }
        Ok(())
    }

    /// Evaluates all `G + K` basis functions at `x`.
    pub fn basis(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.num_basis()];
        let mut scratch = vec![0.0; self.knots.len() - 1];
        self.basis_into(x, &mut out, None, &mut scratch);
        out
    }

    /// Evaluates the basis and, optionally, its derivative with respect to `x`.
    ///
    /// `scratch` must hold at least `G + 2K` entries. Both output slices must
    /// hold `G + K` entries.
    pub fn basis_into(
        &self,
        x: f64,
        out: &mut [f64],
        deriv: Option<&mut [f64]>,
        scratch: &mut [f64],
    ) {
        let t = &self.knots;
        let cells = t.len() - 1;
        let b = &mut scratch[..cells];
        for (i, v) in b.iter_mut().enumerate() {
            *v = if t[i] <= x && x < t[i + 1] { 1.0 } else { 0.0 };
        }
        // Raise the degree in place; after step d the first cells - d entries
        // hold the degree-d basis.
        for d in 1..=self.degree {
            if d == self.degree {
                if let Some(deriv) = deriv {
                    let k = d as f64;
                    for i in 0..cells - d {
                        let left = k / (t[i + d] - t[i]) * b[i];
                        let right = k / (t[i + d + 1] - t[i + 1]) * b[i + 1];
                        deriv[i] = left - right;
                    }
                }
                for i in 0..cells - d {
                    out[i] = cox_de_boor_step(t, b, i, d, x);
                }
                return;
            }
            for i in 0..cells - d {
                b[i] = cox_de_boor_step(t, b, i, d, x);
            }
        }
    }
}

#[inline]
fn cox_de_boor_step(t: &[f64], prev: &[f64], i: usize, d: usize, x: f64) -> f64 {
    let left = (x - t[i]) / (t[i + d] - t[i]) * prev[i];
    let right = (t[i + d + 1] - x) / (t[i + d + 1] - t[i + 1]) * prev[i + 1];
    left + right
}
