//! Pointwise maximizer of `(1 - s) x + alpha(s) B` and the threshold `x0`.

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::learning::LearningFunction;
use crate::profile::PolicyProfile;
use serde::{Deserialize, Serialize};

/// Which branch of the maximization produced the control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", content = "s")]
pub enum ControlCase {
    /// No gain from meetings (`B <= 0`), or no marginal return on learning
    /// time (constant `alpha`): `s = 0`.
    ZeroB,
    /// `B alpha'(1) >= x`: learn full time, `s = 1`.
    Saturated,
    /// `alpha'(s) B = x` with `0 < s < 1`.
    Interior(f64),
}

impl ControlCase {
    pub fn s(&self) -> f64 {
        match *self {
            ControlCase::ZeroB => 0.0,
            ControlCase::Saturated => 1.0,
            ControlCase::Interior(s) => s,
        }
    }
}

/// The point where `B(x0) alpha'(1) = x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub x0: f64,
}

/// The objective being maximized.
pub fn objective(s: f64, x: f64, b: f64, lf: &LearningFunction) -> f64 {
    (1.0 - s) * x + lf.value(s) * b
}

/// Global maximizer of `s -> (1 - s) x + alpha(s) B` on `[0, 1]`.
pub fn optimal_control(x: f64, b: f64, lf: &LearningFunction) -> Result<ControlCase> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    if !b.is_finite() {
        return Err(Error::Domain {
            name: "B",
            value: b,
            domain: "finite",
        });
    }
    Ok(control_unchecked(x, b, lf))
}

#[inline]
pub(crate) fn control_unchecked(x: f64, b: f64, lf: &LearningFunction) -> ControlCase {
    if b <= 0.0 {
        return ControlCase::ZeroB;
    }
    if b * lf.derivative_at_one() >= x {
        return ControlCase::Saturated;
    }
    if lf.is_constant() {
        // Objective is affine in s with slope -x < 0.
        return ControlCase::ZeroB;
    }
    let s = lf.inverse_derivative(x / b);
    if s >= 1.0 {
        ControlCase::Saturated
    } else {
        ControlCase::Interior(s)
    }
}

/// Applies [`optimal_control`] at every node.
///
/// At `x = 0` this gives `s = 1` when `B > 0` and `s = 0` otherwise.
pub fn policy_from_b(b: &[f64], grid: &UniformGrid, lf: &LearningFunction) -> Result<PolicyProfile> {
    if b.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let s = b
        .iter()
        .enumerate()
        .map(|(i, &bi)| control_unchecked(grid.node(i), bi, lf).s())
        .collect();
    PolicyProfile::new(*grid, s)
}

/// Leftmost root of `g(x) = B(x) alpha'(1) - x` with `B` linear on cells.
///
/// Returns 0 when `g(0) <= 0` and `x_max` when `g` stays positive.
pub fn find_x0(b: &[f64], grid: &UniformGrid, lf: &LearningFunction) -> ThresholdPoint {
    let d1 = lf.derivative_at_one();
    let g = |i: usize| b[i] * d1 - grid.node(i);
    if g(0) <= 0.0 {
        return ThresholdPoint { x0: 0.0 };
    }
    for i in 0..grid.n_cells() {
        let (g0, g1) = (g(i), g(i + 1));
        if g1 <= 0.0 {
            let (a, c) = (grid.node(i), grid.node(i + 1));
            // g is affine on the cell, so bisection on it converges to the
            // interpolated root; solve it directly.
            let x0 = a + (c - a) * g0 / (g0 - g1);
            return ThresholdPoint { x0 };
        }
    }
    ThresholdPoint { x0: grid.x_max() }
}
