//! Uniform grids on `[0, x_max]` and trapezoid quadrature.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Nodes `x_i = i h`, `h = x_max / n_cells`, `i = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    x_max: f64,
    n_cells: usize,
}

impl UniformGrid {
    pub fn new(x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::Domain {
                name: "x_max",
                value: x_max,
                domain: "(0, inf)",
            });
        }
        if n_cells < 2 {
            return invalid(format!("n_cells must be at least 2, got {n_cells}"));
        }
        Ok(Self { x_max, n_cells })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.x_max / self.n_cells as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_max
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weights: `h/2` at both ends, `h` inside.
    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.len(), self.h())
    }

    /// Index of the cell containing `x` (clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        let c = (x / self.h()).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.n_cells - 1)
        }
    }

    /// Linear interpolation of nodal `values` at `x`, constant beyond the ends.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        if x <= 0.0 {
            return values[0];
        }
        if x >= self.x_max {
            return values[self.n_cells];
        }
        let i = self.cell_of(x);
        let w = (x - self.node(i)) / self.h();
        values[i] + w * (values[i + 1] - values[i])
    }
}

pub fn trapezoid_weights(len: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; len];
    if len > 0 {
        w[0] = 0.5 * h;
        w[len - 1] = 0.5 * h;
    }
    w
}

/// `h (v_0/2 + v_1 + ... + v_{N-1} + v_N/2)`.
pub fn trapezoid(values: &[f64], h: f64) -> Result<f64> {
    if values.len() < 2 {
        return invalid(format!("trapezoid needs at least 2 samples, got {}", values.len()));
    }
    if !(h > 0.0) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            domain: "(0, inf)",
        });
    }
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    Ok(h * (0.5 * values[0] + inner + 0.5 * values[n]))
}

/// Running trapezoid integral from the left, starting at 0.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Running trapezoid integral from node `i` to the right end.
pub fn tail_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n.saturating_sub(1)).rev() {
        acc += 0.5 * h * (values[i] + values[i + 1]);
        out[i] = acc;
    }
    out
}
