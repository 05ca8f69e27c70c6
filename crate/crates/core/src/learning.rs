//! The learning function `alpha(s) = alpha0 * s^n`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Interaction probability as a function of the time fraction spent learning.
///
/// `n_exp` lies in `(0, 1)` for the concave power family. The degenerate
/// exponent `0` gives the constant rate `alpha0` used by the closed-form
/// oracles; it is only available through [`LearningFunction::constant`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningFunction {
    alpha0: f64,
    n_exp: f64,
}

impl LearningFunction {
    pub fn new(alpha0: f64, n_exp: f64) -> Result<Self> {
        check_alpha0(alpha0)?;
        if !(n_exp > 0.0 && n_exp < 1.0) {
            return Err(Error::Domain {
                name: "n",
                value: n_exp,
                domain: "(0, 1)",
            });
        }
        Ok(Self { alpha0, n_exp })
    }

    /// `alpha(s) = alpha0` for every `s`.
    pub fn constant(alpha0: f64) -> Result<Self> {
        check_alpha0(alpha0)?;
        Ok(Self { alpha0, n_exp: 0.0 })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn n_exp(&self) -> f64 {
        self.n_exp
    }

    pub fn is_constant(&self) -> bool {
        self.n_exp == 0.0
    }

    /// `(alpha(s), alpha'(s))`; `alpha'(0)` is `+inf` for the power family.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                name: "s",
                value: s,
                domain: "[0, 1]",
            });
        }
        Ok((self.value(s), self.derivative(s)))
    }

    /// `alpha(s)` without the domain check; `s` is clamped to `[0, 1]`.
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        if self.is_constant() {
            return self.alpha0;
        }
        let s = s.clamp(0.0, 1.0);
        if s == 0.0 {
            0.0
        } else {
            self.alpha0 * s.powf(self.n_exp)
        }
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let s = s.clamp(0.0, 1.0);
        if s == 0.0 {
            f64::INFINITY
        } else {
            self.alpha0 * self.n_exp * s.powf(self.n_exp - 1.0)
        }
    }

    /// `alpha(1)`.
    pub fn alpha_one(&self) -> f64 {
        self.alpha0
    }

    /// `alpha'(1)`.
    pub fn derivative_at_one(&self) -> f64 {
        self.alpha0 * self.n_exp
    }

    /// Solves `alpha'(s) = target` in closed form; `target > alpha'(1)`.
    pub fn inverse_derivative(&self, target: f64) -> f64 {
        (self.alpha0 * self.n_exp / target).powf(1.0 / (1.0 - self.n_exp))
    }

    /// Safeguarded bisection for `alpha'(s) = target` on `[0, 1]`.
    ///
    /// Returns `1` when `alpha'(1) >= target`. Valid for any strictly
    /// concave learning function; kept next to the closed form as a check.
    pub fn inverse_derivative_bisect(&self, target: f64, tol: f64) -> f64 {
        if self.derivative(1.0) >= target {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.derivative(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn check_alpha0(alpha0: f64) -> Result<()> {
    if alpha0.is_finite() && alpha0 > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "alpha0",
            value: alpha0,
            domain: "(0, inf)",
        })
    }
}
