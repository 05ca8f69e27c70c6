//! Grid-aligned sample vectors: densities, cdfs, value functions, policies.

use crate::error::{invalid, Error, Result};
use crate::grid::{cumulative_trapezoid, tail_trapezoid, trapezoid, UniformGrid};

macro_rules! profile {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            grid: UniformGrid,
            values: Vec<f64>,
        }

        impl $name {
            /// Wraps nodal samples; the length must match the grid and all
            /// entries must be finite.
            pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
                check_samples(&grid, &values)?;
                Ok(Self { grid, values })
            }

            pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
                Self::new(grid, grid.nodes().into_iter().map(f).collect())
            }

            pub fn grid(&self) -> &UniformGrid {
                &self.grid
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<f64> {
                self.values
            }
        }
    };
}

profile!(
    /// Agent density `f` or `phi` per unit knowledge.
    DensityProfile
);
profile!(
    /// Cumulative distribution `F` or `Phi`.
    CdfProfile
);
profile!(
    /// Value function `V` or rescaled `v`.
    ValueProfile
);
profile!(
    /// Fraction of time spent learning, `S`.
    PolicyProfile
);

fn check_samples(grid: &UniformGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return invalid(format!(
            "expected {} samples for the grid, got {}",
            grid.len(),
            values.len()
        ));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return invalid(format!("sample {i} is not finite"));
    }
    Ok(())
}

pub(crate) fn same_grid(a: &UniformGrid, b: &UniformGrid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl DensityProfile {
    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.grid.h()).expect("grid has at least 3 nodes")
    }

    /// Smallest sample, for nonnegativity checks.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.min_value() >= -tol
    }

    pub fn is_normalized(&self, mass_tol: f64) -> bool {
        (self.mass() - 1.0).abs() <= mass_tol
    }

    /// Rescales to unit trapezoid mass.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return invalid("cannot normalize a density with nonpositive mass");
        }
        Self::new(self.grid, self.values.iter().map(|v| v / m).collect())
    }

    /// Gaussian `N(mean, sd^2)` restricted to the grid and normalized.
    pub fn truncated_gaussian(grid: UniformGrid, mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(Error::Domain {
                name: "sd",
                value: sd,
                domain: "(0, inf)",
            });
        }
        Self::from_fn(grid, |x| (-(x - mean).powi(2) / (2.0 * sd * sd)).exp())?.normalized()
    }
}

impl CdfProfile {
    /// Checks `Phi_0 = 0`, monotonicity and range, each within `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.values[0].abs() > tol {
            return invalid(format!("cdf starts at {}", self.values[0]));
        }
        for (i, w) in self.values.windows(2).enumerate() {
            if w[1] < w[0] - tol {
                return invalid(format!("cdf decreases at node {}", i + 1));
            }
        }
        if self.values.iter().any(|&p| p < -tol || p > 1.0 + tol) {
            return invalid("cdf leaves [0, 1]");
        }
        Ok(())
    }
}

impl ValueProfile {
    /// Forward difference quotients `(v_{i+1} - v_i) / h`.
    pub fn slopes(&self) -> Vec<f64> {
        let h = self.grid.h();
        self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    pub fn is_non_decreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

impl PolicyProfile {
    pub fn constant(grid: UniformGrid, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                name: "s",
                value: s,
                domain: "[0, 1]",
            });
        }
        Ok(Self {
            grid,
            values: vec![s; grid.len()],
        })
    }

    pub fn in_unit_interval(&self) -> bool {
        self.values.iter().all(|s| (0.0..=1.0).contains(s))
    }

    pub fn is_non_increasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Cumulative trapezoid of the density.
pub fn cdf_from_density(f: &DensityProfile) -> CdfProfile {
    CdfProfile {
        grid: f.grid,
        values: cumulative_trapezoid(&f.values, f.grid.h()),
    }
}

/// `B_i = int_{x_i}^{x_max} (v(y) - v(x_i)) phi(y) dy` by the trapezoid rule.
///
/// The upper limit is truncated at the grid end, so `B` at the last node is 0.
pub fn b_functional(v: &ValueProfile, phi: &DensityProfile) -> Result<Vec<f64>> {
    same_grid(&v.grid, &phi.grid)?;
    Ok(b_from_slices(&v.values, &phi.values, v.grid.h()))
}

pub(crate) fn b_from_slices(v: &[f64], phi: &[f64], h: f64) -> Vec<f64> {
    let vphi: Vec<f64> = v.iter().zip(phi).map(|(a, b)| a * b).collect();
    let t_vphi = tail_trapezoid(&vphi, h);
    let t_phi = tail_trapezoid(phi, h);
    let mut b: Vec<f64> = (0..v.len()).map(|i| t_vphi[i] - v[i] * t_phi[i]).collect();
    *b.last_mut().unwrap() = 0.0;
    b
}
