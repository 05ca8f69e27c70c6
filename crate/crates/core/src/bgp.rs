//! Balanced growth path: stationary rescaled system solved by damped fixed
//! point iteration over `(phi, v, S, gamma)`.
//!
//! Each sweep performs
//! 1. a Boltzmann step for `phi` with the previous policy and growth rate,
//! 2. a value step for `v` against the new `phi`,
//! 3. a policy and growth-rate update,
//!
//! and blends every quantity as `y <- (1 - omega) y_old + omega y_new`.
//!
//! With diffusion (`nu > 0`) the Boltzmann step is a conservative
//! finite-volume system with the unit-mass constraint attached through one
//! multiplier. Without diffusion the Pareto tail cannot be pinned at the right
//! boundary, so the step goes through the tail transform of [`crate::ktransform`],
//! which imposes the tail coefficient exactly.

use crate::error::{invalid, Error, Result};
use crate::grid::{tail_trapezoid, trapezoid, UniformGrid};
use crate::ktransform::tail_exact_boltzmann;
use crate::learning::LearningFunction;
use crate::linalg::{solve_bordered, Tridiagonal};
use crate::maximizer::{find_x0, policy_from_b, ThresholdPoint};
use crate::profile::{
    b_functional, cdf_from_density, same_grid, CdfProfile, DensityProfile, PolicyProfile, ValueProfile,
};
use serde::{Deserialize, Serialize};

/// Closure of the value equation at `x_max` when `nu > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RightBoundary {
    /// `v'(x_max) = 0`.
    #[default]
    Neumann,
    /// `v'(x_max) = 1/r`, the slope of the no-learning value `x/r`.
    FarField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgpConfig {
    pub grid: UniformGrid,
    pub nu: f64,
    pub r: f64,
    pub lf: LearningFunction,
    /// Tail exponent; required when `nu = 0`, rejected otherwise.
    pub theta: Option<f64>,
    /// Pareto coefficient imposed when `nu = 0` (default 1).
    pub pareto_k: Option<f64>,
    pub omega: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Offset `eps` in the advection coefficient `gamma (x + eps)`.
    pub eps_hjb: f64,
    pub right_bc: RightBoundary,
    pub mass_tol: f64,
    pub num_tol: f64,
}

impl BgpConfig {
    /// Configuration with the default numerical parameters.
    pub fn new(grid: UniformGrid, nu: f64, r: f64, lf: LearningFunction, theta: Option<f64>) -> Result<Self> {
        let cfg = Self {
            grid,
            nu,
            r,
            lf,
            theta,
            pareto_k: None,
            omega: 0.75,
            tol: 1e-8,
            max_iters: 5000,
            eps_hjb: 0.0,
            right_bc: RightBoundary::Neumann,
            mass_tol: 1e-8,
            num_tol: 1e-9,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, domain| Err(Error::Domain { name, value, domain });
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad("nu", self.nu, "[0, inf)");
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad("r", self.r, "(0, inf)");
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return bad("omega", self.omega, "(0, 1]");
        }
        if !(self.tol > 0.0) {
            return bad("tol", self.tol, "(0, inf)");
        }
        if !(self.eps_hjb >= 0.0) {
            return bad("eps_hjb", self.eps_hjb, "[0, inf)");
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be positive");
        }
        if self.nu == 0.0 {
            match self.theta {
                Some(t) if t > 0.0 && t < 1.0 => {}
                Some(t) => return bad("theta", t, "(0, 1)"),
                None => return invalid("theta is required when nu = 0"),
            }
            if let Some(k) = self.pareto_k {
                if !(k > 0.0 && k.is_finite()) {
                    return bad("pareto_k", k, "(0, inf)");
                }
            }
        } else {
            if self.theta.is_some() {
                return invalid("theta is only used when nu = 0; remove it for nu > 0");
            }
            if self.pareto_k.is_some() {
                return invalid("pareto_k is only used when nu = 0; remove it for nu > 0");
            }
        }
        Ok(())
    }

    fn theta_value(&self) -> f64 {
        self.theta.unwrap_or(0.0)
    }

    fn k_target(&self) -> f64 {
        self.pareto_k.unwrap_or(1.0)
    }

    /// Starting growth rate, half of the largest admissible value.
    pub fn initial_gamma(&self) -> f64 {
        if self.nu > 0.0 {
            (self.nu * self.lf.alpha_one()).sqrt()
        } else {
            0.5 * self.theta_value() * self.lf.alpha_one()
        }
    }

    /// Default starting iterate: truncated Gaussian(5, 1) and `v = x/r`.
    pub fn initial_guess(&self) -> Result<(DensityProfile, ValueProfile)> {
        let phi = DensityProfile::truncated_gaussian(self.grid, 5.0, 1.0)?;
        let r = self.r;
        let v = ValueProfile::from_fn(self.grid, |x| x / r)?;
        Ok((phi, v))
    }
}

/// Output of one Boltzmann step.
#[derive(Debug, Clone)]
pub struct PhiStep {
    pub phi: DensityProfile,
    /// Distribution function; for `nu = 0` taken from the tail transform.
    pub cdf: CdfProfile,
    /// Mass beyond `x_max` (0 when `nu > 0`).
    pub tail_mass: f64,
    /// Multiplier of the mass constraint (0 when `nu = 0`).
    pub multiplier: f64,
    /// `theta / lim x~ K` for `nu = 0`.
    pub gamma_k: Option<f64>,
}

/// Collision term `Q_i = phi_i A_i - alpha(S_i) phi_i T_i` with
/// `A_i = sum_{j<i} w_j a_j + w_i a_i / 2`, `a = alpha(S) phi`, and
/// `T_i = w_i phi_i / 2 + sum_{j>i} w_j phi_j`.
///
/// At interior nodes these are the trapezoid integrals over `[0, x_i]` and
/// `[x_i, x_max]`; splitting the end weights this way makes `sum w_i Q_i = 0`
/// exactly.
pub(crate) fn collision(phi: &[f64], s: &[f64], lf: &LearningFunction, w: &[f64]) -> Vec<f64> {
    let n = phi.len();
    let a: Vec<f64> = phi.iter().zip(s).map(|(p, &si)| lf.value(si) * p).collect();
    let mut q = vec![0.0; n];
    let mut below = 0.0;
    for i in 0..n {
        q[i] = phi[i] * (below + 0.5 * w[i] * a[i]);
        below += w[i] * a[i];
    }
    let mut above = 0.0;
    for i in (0..n).rev() {
        q[i] -= a[i] * (above + 0.5 * w[i] * phi[i]);
        above += w[i] * phi[i];
    }
    q
}

/// One Boltzmann step for the stationary density.
pub fn bgp_phi_step(
    phi_prev: &DensityProfile,
    s_prev: &PolicyProfile,
    gamma_prev: f64,
    cfg: &BgpConfig,
) -> Result<PhiStep> {
    same_grid(phi_prev.grid(), s_prev.grid())?;
    same_grid(phi_prev.grid(), &cfg.grid)?;
    if cfg.nu == 0.0 {
        if !(gamma_prev > 0.0) {
            return Err(Error::Domain {
                name: "gamma",
                value: gamma_prev,
                domain: "(0, inf) when nu = 0",
            });
        }
        let theta = cfg.theta_value();
        let k = cfg.k_target();
        let te = tail_exact_boltzmann(s_prev, theta, k, theta * k / gamma_prev, &cfg.lf)?;
        return Ok(PhiStep {
            phi: te.density,
            cdf: te.cdf,
            tail_mass: te.tail_mass,
            multiplier: 0.0,
            gamma_k: Some(te.gamma),
        });
    }
    let g = &cfg.grid;
    let n = g.n_cells();
    let h = g.h();
    let w = g.weights();
    let q = collision(phi_prev.values(), s_prev.values(), &cfg.lf, &w);
    // Fluxes G_{i+1/2} = A_{i+1} phi_{i+1} - b_i phi_i for i = 0..N-1, zero at x_max;
    // unknowns phi_1..phi_N (phi_0 = 0).
    let a = |i: usize| {
        let x = g.node(i);
        gamma_prev * x + cfg.nu * x * x / h
    };
    let b = |i: usize| {
        let x = g.node(i);
        cfg.nu * x * x / h
    };
    let mut t = Tridiagonal::zeros(n);
    for row in 0..n {
        let i = row + 1;
        t.diag[row] = a(i) + if i < n { b(i) } else { 0.0 };
        if i < n {
            t.upper[row] = -a(i + 1);
        }
        if row > 0 {
            t.lower[row] = -b(i - 1);
        }
    }
    let rhs: Vec<f64> = (1..=n).map(|i| w[i] * q[i]).collect();
    let wi = &w[1..];
    let (sol, lambda) = solve_bordered(&t, wi, wi, &rhs, 1.0)?;
    let mut phi = Vec::with_capacity(n + 1);
    phi.push(0.0);
    phi.extend(sol);
    let phi = DensityProfile::new(*g, phi)?;
    let cdf = cdf_from_density(&phi);
    Ok(PhiStep {
        phi,
        cdf,
        tail_mass: 0.0,
        multiplier: lambda,
        gamma_k: None,
    })
}

/// Solves `(r - gamma + extra_i) v_i + gamma (x_i + eps) D^- v_i - nu x_i^2 D^2 v_i = q_i`.
fn solve_value_system(q: &[f64], extra: &[f64], gamma: f64, cfg: &BgpConfig) -> Result<Vec<f64>> {
    let g = &cfg.grid;
    let n = g.n_cells();
    let h = g.h();
    let mut t = Tridiagonal::zeros(n + 1);
    let mut rhs = q.to_vec();
    for i in 0..=n {
        let x = g.node(i);
        let c = gamma * (x + cfg.eps_hjb) / h;
        let d = cfg.nu * x * x / (h * h);
        t.diag[i] = cfg.r - gamma + extra[i];
        if i == 0 {
            // ghost node v_{-1} = v_0 removes both difference terms
            continue;
        }
        t.diag[i] += c;
        t.lower[i] -= c;
        if d > 0.0 {
            if i < n {
                t.diag[i] += 2.0 * d;
                t.lower[i] -= d;
                t.upper[i] -= d;
            } else {
                match cfg.right_bc {
                    RightBoundary::Neumann => {
                        t.diag[i] += 2.0 * d;
                        t.lower[i] -= 2.0 * d;
                    }
                    RightBoundary::FarField => {
                        t.diag[i] = 1.0;
                        t.lower[i] = -1.0;
                        rhs[i] = h / cfg.r;
                    }
                }
            }
        }
    }
    t.solve(&rhs)
}

/// One value step against the new density.
///
/// The right side is the maximized Hamiltonian `max_s (1 - s) x + alpha(s) B`
/// with `B = B(phi_new, v_prev)`. The part `-alpha(S) v_i T_i` of
/// `alpha(S) B_i`, with `T_i` the tail mass above `x_i`, is taken implicitly.
pub fn bgp_v_step(
    phi_new: &DensityProfile,
    v_prev: &ValueProfile,
    gamma_prev: f64,
    cfg: &BgpConfig,
) -> Result<ValueProfile> {
    same_grid(phi_new.grid(), v_prev.grid())?;
    same_grid(phi_new.grid(), &cfg.grid)?;
    let g = &cfg.grid;
    let h = g.h();
    let b = b_functional(v_prev, phi_new)?;
    let s = policy_from_b(&b, g, &cfg.lf)?;
    let phi = phi_new.values();
    let vphi: Vec<f64> = v_prev.values().iter().zip(phi).map(|(a, b)| a * b).collect();
    let tv = tail_trapezoid(&vphi, h);
    let tp = tail_trapezoid(phi, h);
    let mut q = vec![0.0; g.len()];
    let mut extra = vec![0.0; g.len()];
    for i in 0..g.len() {
        let si = s.values()[i];
        let a = cfg.lf.value(si);
        q[i] = (1.0 - si) * g.node(i) + a * tv[i];
        extra[i] = a * tp[i];
    }
    ValueProfile::new(*g, solve_value_system(&q, &extra, gamma_prev, cfg)?)
}

/// Growth rate implied by a policy and density.
///
/// `2 sqrt(nu int alpha(S) phi)` for `nu > 0`, otherwise
/// `theta int alpha(S) phi` with the mass beyond `x_max` counted at `alpha(S(x_max))`.
pub fn gamma_from_policy(s: &PolicyProfile, phi: &DensityProfile, tail_mass: f64, cfg: &BgpConfig) -> Result<f64> {
    same_grid(s.grid(), phi.grid())?;
    let prod: Vec<f64> = s
        .values()
        .iter()
        .zip(phi.values())
        .map(|(&si, p)| cfg.lf.value(si) * p)
        .collect();
    let mut m = trapezoid(&prod, cfg.grid.h())?;
    if cfg.nu == 0.0 {
        m += cfg.lf.value(*s.values().last().unwrap()) * tail_mass;
    }
    if m < -cfg.num_tol {
        return invalid(format!("negative interaction integral {m}"));
    }
    let m = m.max(0.0);
    Ok(if cfg.nu > 0.0 {
        2.0 * (cfg.nu * m).sqrt()
    } else {
        cfg.theta_value() * m
    })
}

/// New policy `argmax` against `B(v_new, phi_new)` and the matching growth rate.
pub fn policy_gamma_update(
    phi_new: &DensityProfile,
    v_new: &ValueProfile,
    tail_mass: f64,
    cfg: &BgpConfig,
) -> Result<(PolicyProfile, f64)> {
    let b = b_functional(v_new, phi_new)?;
    let s = policy_from_b(&b, &cfg.grid, &cfg.lf)?;
    let gamma = gamma_from_policy(&s, phi_new, tail_mass, cfg)?;
    Ok((s, gamma))
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    /// Relative sup-norm change of one more Boltzmann step at the solution.
    pub boltzmann: f64,
    /// Relative sup-norm change of one more value step at the solution.
    pub hjb: f64,
    /// `|gamma - gamma_from_policy(S, phi)|`.
    pub gamma_defect: f64,
    /// For `nu = 0`: `|gamma - theta / lim x~ K|`.
    pub gamma_tail_defect: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BgpSolution {
    pub phi: DensityProfile,
    pub cdf: CdfProfile,
    pub v: ValueProfile,
    pub policy: PolicyProfile,
    pub gamma: f64,
    pub x0: ThresholdPoint,
    pub tail_mass: f64,
    pub multiplier: f64,
    pub residuals: Residuals,
    pub converged: bool,
    pub degenerate: bool,
    pub iterations: usize,
    /// Largest relative change in the final sweep.
    pub last_change: f64,
    pub warnings: Vec<String>,
}

fn blend(old: &[f64], new: &[f64], omega: f64) -> Vec<f64> {
    old.iter()
        .zip(new)
        .map(|(o, n)| (1.0 - omega) * o + omega * n)
        .collect()
}

fn rel_change(old: &[f64], new: &[f64]) -> f64 {
    let scale = new.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    old.iter().zip(new).fold(0.0f64, |m, (o, n)| m.max((o - n).abs())) / scale
}

/// Fraction of the mass in the first 5% of the grid.
pub fn origin_mass_fraction(phi: &DensityProfile) -> f64 {
    let g = phi.grid();
    let m = ((g.n_cells() as f64) * 0.05).round().max(1.0) as usize;
    let head = trapezoid(&phi.values()[..=m], g.h()).unwrap_or(0.0);
    let total = phi.mass();
    if total > 0.0 {
        head / total
    } else {
        0.0
    }
}

/// Runs the damped fixed-point iteration from `(phi_init, v_init)`.
pub fn run_bgp(cfg: &BgpConfig, phi_init: &DensityProfile, v_init: &ValueProfile) -> Result<BgpSolution> {
    cfg.validate()?;
    same_grid(phi_init.grid(), &cfg.grid)?;
    same_grid(v_init.grid(), &cfg.grid)?;
    let mut warnings = Vec::new();
    let omega = cfg.omega;
    let mut phi = phi_init.clone();
    let mut v = v_init.clone();
    let mut gamma = cfg.initial_gamma();
    let (mut s, _) = policy_gamma_update(&phi, &v, 0.0, cfg)?;
    let mut cdf = cdf_from_density(&phi);
    let mut tail = 0.0;
    let mut multiplier = 0.0;
    let mut converged = false;
    let mut collapsed = 0usize;
    let mut degenerate = false;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;
    let mut warned = false;
    for it in 1..=cfg.max_iters {
        iterations = it;
        if cfg.nu == 0.0 && cfg.r - gamma <= 0.0 && !warned {
            warnings.push(format!(
                "r - gamma = {} <= 0: value equation is ill-posed",
                cfg.r - gamma
            ));
            warned = true;
        }
        let step = bgp_phi_step(&phi, &s, gamma, cfg)?;
        let phi_new = DensityProfile::new(cfg.grid, blend(phi.values(), step.phi.values(), omega))?;
        cdf = CdfProfile::new(cfg.grid, blend(cdf.values(), step.cdf.values(), omega))?;
        tail = (1.0 - omega) * tail + omega * step.tail_mass;
        multiplier = step.multiplier;
        let v_step = bgp_v_step(&phi_new, &v, gamma, cfg)?;
        let v_new = ValueProfile::new(cfg.grid, blend(v.values(), v_step.values(), omega))?;
        let (s_up, g_up) = policy_gamma_update(&phi_new, &v_new, tail, cfg)?;
        let s_new = PolicyProfile::new(cfg.grid, blend(s.values(), s_up.values(), omega))?;
        let g_new = (1.0 - omega) * gamma + omega * g_up;
        last_change = rel_change(phi.values(), phi_new.values())
            .max(rel_change(v.values(), v_new.values()))
            .max((g_new - gamma).abs() / g_new.abs().max(f64::MIN_POSITIVE));
        phi = phi_new;
        v = v_new;
        s = s_new;
        gamma = g_new;
        if gamma < 1e-8 {
            collapsed += 1;
            if collapsed >= 10 {
                degenerate = true;
                break;
            }
        } else {
            collapsed = 0;
        }
        if !last_change.is_finite() {
            return invalid(format!("iteration diverged at sweep {it}"));
        }
        if last_change < cfg.tol {
            converged = true;
            break;
        }
    }
    if origin_mass_fraction(&phi) > 0.9 {
        degenerate = true;
    }
    let b = b_functional(&v, &phi)?;
    let x0 = find_x0(&b, &cfg.grid, &cfg.lf);
    let (_, g_formula) = policy_gamma_update(&phi, &v, tail, cfg)?;
    let residuals = if degenerate {
        Residuals {
            boltzmann: f64::NAN,
            hjb: f64::NAN,
            gamma_defect: (gamma - g_formula).abs(),
            gamma_tail_defect: None,
        }
    } else {
        let step = bgp_phi_step(&phi, &s, gamma, cfg)?;
        let v_step = bgp_v_step(&phi, &v, gamma, cfg)?;
        Residuals {
            boltzmann: rel_change(phi.values(), step.phi.values()),
            hjb: rel_change(v.values(), v_step.values()),
            gamma_defect: (gamma - g_formula).abs(),
            gamma_tail_defect: step.gamma_k.map(|gk| (gamma - gk).abs()),
        }
    };
    Ok(BgpSolution {
        phi,
        cdf,
        v,
        policy: s,
        gamma,
        x0,
        tail_mass: tail,
        multiplier,
        residuals,
        converged,
        degenerate,
        iterations,
        last_change,
        warnings,
    })
}

/// One structural check on a solution.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        value,
        limit,
        pass: value <= limit,
    }
}

/// Structural properties every balanced growth path must have. Each entry
/// reports the measured violation and the allowed limit.
pub fn check_invariants(sol: &BgpSolution, cfg: &BgpConfig) -> Vec<Check> {
    let g = &cfg.grid;
    let v = sol.v.values();
    let slopes = sol.v.slopes();
    let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    let max_slope = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass_defect = (sol.phi.mass() + sol.tail_mass - 1.0).abs();
    let s_rise = sol.policy.values().windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let v_drop = v.windows(2).fold(0.0f64, |m, w| m.max(w[0] - w[1]));
    let scale = v[0].abs().max(f64::MIN_POSITIVE);
    let flat = (0..g.len())
        .take_while(|&i| g.node(i) <= sol.x0.x0)
        .fold(0.0f64, |m, i| m.max((v[i] - v[0]).abs() / scale));
    let below = if sol.gamma < cfg.r {
        (0..g.len()).fold(0.0f64, |m, i| m.max(g.node(i) / cfg.r - v[i]))
    } else {
        0.0
    };
    let mut out = vec![
        check("mass_defect", mass_defect, 1e-8),
        check("slope_below_zero", -min_slope, 1e-8),
        check("slope_above_1_over_r", max_slope - 1.0 / cfg.r, 1e-8),
        check("v_decrease", v_drop / scale.max(1.0), cfg.num_tol),
        check("policy_increase", s_rise, cfg.num_tol),
        check("v_variation_on_0_x0", flat, 1e-6),
        check("v_below_x_over_r", below, 1e-6),
        check("gamma_defect", sol.residuals.gamma_defect, 1e-4),
    ];
    if cfg.nu == 0.0 {
        let theta = cfg.theta_value();
        out.push(check(
            "gamma_over_theta_above_alpha1",
            sol.gamma / theta - cfg.lf.alpha_one(),
            1e-8,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> UniformGrid {
        UniformGrid::new(20.0, 1000).unwrap()
    }

    #[test]
    fn config_validation() {
        let lf = LearningFunction::new(0.005, 0.5).unwrap();
        assert!(BgpConfig::new(grid(), 0.0, 0.1, lf, None).is_err());
        assert!(BgpConfig::new(grid(), 0.01, 0.1, lf, Some(0.3)).is_err());
        assert!(BgpConfig::new(grid(), 0.0, 0.1, lf, Some(1.5)).is_err());
        assert!(BgpConfig::new(grid(), 0.01, 0.1, lf, None).is_ok());
        let mut c = BgpConfig::new(grid(), 0.0, 0.1, lf, Some(0.3)).unwrap();
        c.omega = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn collision_conserves_mass() {
        let g = grid();
        let lf = LearningFunction::new(0.075, 0.3).unwrap();
        let phi = DensityProfile::truncated_gaussian(g, 5.0, 1.0).unwrap();
        let s = PolicyProfile::from_fn(g, |x| (1.0 - x / 20.0).powi(2)).unwrap();
        let w = g.weights();
        let q = collision(phi.values(), s.values(), &lf, &w);
        let total: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!(total.abs() < 1e-15);
    }

    #[test]
    fn phi_step_with_zero_source_has_unit_mass() {
        let g = grid();
        let lf = LearningFunction::new(0.005, 0.5).unwrap();
        let cfg = BgpConfig::new(g, 0.01, 0.1, lf, None).unwrap();
        let phi = DensityProfile::truncated_gaussian(g, 5.0, 1.0).unwrap();
        let s = PolicyProfile::constant(g, 0.0).unwrap();
        let st = bgp_phi_step(&phi, &s, 0.02, &cfg).unwrap();
        assert_eq!(st.phi.values()[0], 0.0);
        assert!((st.phi.mass() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn value_step_reproduces_linear_value() {
        let g = grid();
        let lf = LearningFunction::new(0.005, 0.5).unwrap();
        let mut cfg = BgpConfig::new(g, 0.0, 0.1, lf, Some(0.3)).unwrap();
        cfg.theta = Some(0.3);
        let phi = DensityProfile::new(g, vec![0.0; g.len()]).unwrap();
        let v0 = ValueProfile::new(g, vec![0.0; g.len()]).unwrap();
        let v = bgp_v_step(&phi, &v0, 0.04, &cfg).unwrap();
        for (vi, x) in v.values().iter().zip(g.nodes()) {
            assert!((vi - x / 0.1).abs() < 1e-10);
        }
        let z = solve_value_system(&vec![0.0; g.len()], &vec![0.0; g.len()], 0.04, &cfg).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gamma_formula_examples() {
        let g = grid();
        let lf = LearningFunction::new(0.075, 0.3).unwrap();
        let cfg = BgpConfig::new(g, 0.0, 0.05, lf, Some(0.3)).unwrap();
        let phi = DensityProfile::truncated_gaussian(g, 5.0, 1.0).unwrap();
        let one = PolicyProfile::constant(g, 1.0).unwrap();
        let gm = gamma_from_policy(&one, &phi, 0.0, &cfg).unwrap();
        assert!((gm - 0.3 * 0.075).abs() < 1e-15);
        let zero = PolicyProfile::constant(g, 0.0).unwrap();
        assert_eq!(gamma_from_policy(&zero, &phi, 0.0, &cfg).unwrap(), 0.0);
        // nu = 0.01 and int alpha(S) phi = 0.0025
        let lf = LearningFunction::new(0.0025, 0.5).unwrap();
        let cfg = BgpConfig::new(g, 0.01, 0.05, lf, None).unwrap();
        let gm = gamma_from_policy(&one, &phi, 0.0, &cfg).unwrap();
        assert!((gm - 0.01).abs() < 1e-15);
    }
}
