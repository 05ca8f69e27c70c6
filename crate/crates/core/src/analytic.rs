//! Closed-form reference solutions.

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::profile::CdfProfile;
use serde::{Deserialize, Serialize};

/// Pareto tail `1 - Phi(x) ~ k x^(-1/theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoParams {
    k: f64,
    theta: f64,
}

impl ParetoParams {
    pub fn new(k: f64, theta: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain {
                name: "k",
                value: k,
                domain: "(0, inf)",
            });
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Domain {
                name: "theta",
                value: theta,
                domain: "(0, 1)",
            });
        }
        Ok(Self { k, theta })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `Phi(x) = 1 / (1 + k x^(-1/theta))`, with `Phi(0) = 0`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        // written with x^(1/theta) to stay finite for tiny x
        let p = x.powf(1.0 / self.theta);
        p / (p + self.k)
    }

    /// `1 - Phi(x)`, accurate deep in the tail.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let p = x.powf(1.0 / self.theta);
        self.k / (p + self.k)
    }

    /// `Phi'(x)`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let p = x.powf(1.0 / self.theta);
        self.k * p / (self.theta * x * (p + self.k).powi(2))
    }
}

/// Balanced growth path for constant `alpha = alpha0`: `gamma = alpha0 theta`
/// and the Pareto cdf.
pub fn constant_alpha_bgp(alpha0: f64, p: &ParetoParams, grid: &UniformGrid) -> Result<(f64, CdfProfile)> {
    if !(alpha0.is_finite() && alpha0 > 0.0) {
        return Err(Error::Domain {
            name: "alpha0",
            value: alpha0,
            domain: "(0, inf)",
        });
    }
    let phi = CdfProfile::from_fn(*grid, |x| p.cdf(x))?;
    Ok((alpha0 * p.theta, phi))
}

/// Solution of `F' = -alpha0 F (1 - F)` with `F(0) = F0`.
pub fn logistic_cdf(f0: f64, alpha0: f64, t: f64) -> f64 {
    let e = (-alpha0 * t).exp();
    f0 * e / (1.0 - f0 + f0 * e)
}

/// Minimal Fisher-KPP front speed `2 sqrt(nu alpha0)`.
pub fn kpp_wave_speed(nu: f64, alpha0: f64) -> f64 {
    2.0 * (nu * alpha0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::trapezoid;

    #[test]
    fn constant_alpha_examples() {
        let p = ParetoParams::new(1.0, 0.3).unwrap();
        let g = UniformGrid::new(20.0, 1000).unwrap();
        let (gamma, phi) = constant_alpha_bgp(0.075, &p, &g).unwrap();
        assert!((gamma - 0.0225).abs() < 1e-16);
        assert_eq!(phi.values()[0], 0.0);
        assert!(phi.check(0.0).is_ok());
        let p = ParetoParams::new(1.0, 0.5).unwrap();
        assert_eq!(p.cdf(1.0), 0.5);
        assert!(p.cdf(1e8) > 1.0 - 1e-15);
        assert!(p.cdf(1e-8) < 1e-15);
        assert!(ParetoParams::new(1.0, 1.0).is_err());
        assert!(ParetoParams::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn gamma_consistency_with_differenced_density() {
        // gamma = theta * alpha0 * mass of Phi' over the grid
        let p = ParetoParams::new(1.0, 0.3).unwrap();
        let g = UniformGrid::new(20.0, 1000).unwrap();
        let (gamma, phi) = constant_alpha_bgp(0.075, &p, &g).unwrap();
        let v = phi.values();
        let h = g.h();
        let mut dens = vec![0.0; g.len()];
        for i in 1..g.n_cells() {
            dens[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        }
        dens[g.n_cells()] = (v[g.n_cells()] - v[g.n_cells() - 1]) / h;
        let mass = trapezoid(&dens, h).unwrap() + p.survival(20.0);
        assert!((gamma - p.theta() * 0.075 * mass).abs() < 1e-3);
    }

    fn rk4_logistic(f0: f64, a: f64, t: f64, tau: f64) -> f64 {
        let rhs = |f: f64| -a * f * (1.0 - f);
        let steps = (t / tau).round() as usize;
        let mut f = f0;
        for _ in 0..steps {
            let k1 = rhs(f);
            let k2 = rhs(f + 0.5 * tau * k1);
            let k3 = rhs(f + 0.5 * tau * k2);
            let k4 = rhs(f + tau * k3);
            f += tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        f
    }

    #[test]
    fn logistic_examples() {
        assert_eq!(logistic_cdf(0.5, 0.3, 0.0), 0.5);
        assert_eq!(logistic_cdf(0.0, 0.3, 5.0), 0.0);
        assert_eq!(logistic_cdf(1.0, 0.3, 5.0), 1.0);
        let t = 2f64.ln();
        assert!((logistic_cdf(0.5, 1.0, t) - 1.0 / 3.0).abs() < 1e-15);
        let oracle = rk4_logistic(0.5, 1.0, t, 1e-4 * t / t);
        assert!((logistic_cdf(0.5, 1.0, (t / 1e-4).round() * 1e-4) - oracle).abs() < 1e-8);
        for f0 in [0.1, 0.4, 0.9] {
            for t in [0.5, 3.0, 12.0] {
                assert!((logistic_cdf(f0, 0.2, t) - rk4_logistic(f0, 0.2, t, 1e-4)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn logistic_monotone_in_time() {
        let mut prev = 1.0;
        for k in 0..50 {
            let f = logistic_cdf(0.7, 0.4, k as f64 * 0.3);
            assert!(f <= prev && (0.0..=1.0).contains(&f));
            prev = f;
        }
    }

    #[test]
    fn kpp_speed() {
        assert_eq!(kpp_wave_speed(0.0, 0.3), 0.0);
        assert_eq!(kpp_wave_speed(1.0, 1.0), 2.0);
        assert!((kpp_wave_speed(0.005, 0.075) - 0.038729833462074).abs() < 1e-14);
        let a = kpp_wave_speed(0.02, 0.075);
        assert!((a - 2.0 * kpp_wave_speed(0.005, 0.075)).abs() < 1e-15);
    }
}
