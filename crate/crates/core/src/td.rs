//! Time-dependent forward-backward solver and a Fisher-KPP simulator.
//!
//! The density moves forward in time with a semi-implicit step (implicit
//! geometric diffusion, explicit collisions); the value function moves
//! backward from `V(., T) = 0`; the policy is re-maximized at every time
//! level. The two sweeps alternate until the policy stops changing.

use crate::bgp::collision;
use crate::error::{invalid, Error, Result};
use crate::grid::{trapezoid, UniformGrid};
use crate::learning::LearningFunction;
use crate::linalg::Tridiagonal;
use crate::maximizer::policy_from_b;
use crate::profile::{b_functional, same_grid, DensityProfile, PolicyProfile, ValueProfile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdConfig {
    pub grid: UniformGrid,
    pub tau: f64,
    pub horizon: f64,
    pub nu: f64,
    pub r: f64,
    pub lf: LearningFunction,
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Steps between recorded snapshots; default `ceil(steps / 200)`.
    pub snapshot_every: Option<usize>,
    pub mass_tol: f64,
    pub num_tol: f64,
}

impl TdConfig {
    pub fn new(grid: UniformGrid, tau: f64, horizon: f64, nu: f64, r: f64, lf: LearningFunction) -> Result<Self> {
        let cfg = Self {
            grid,
            tau,
            horizon,
            nu,
            r,
            lf,
            outer_tol: 1e-6,
            max_outer: 200,
            snapshot_every: None,
            mass_tol: 1e-8,
            num_tol: 1e-9,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, domain| Err(Error::Domain { name, value, domain });
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau", self.tau, "(0, inf)");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("T", self.horizon, "(0, inf)");
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad("nu", self.nu, "[0, inf)");
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad("r", self.r, "(0, inf)");
        }
        if !(self.outer_tol > 0.0) {
            return bad("outer_tol", self.outer_tol, "(0, inf)");
        }
        if self.max_outer == 0 {
            return invalid("max_outer must be positive");
        }
        if self.snapshot_every == Some(0) {
            return invalid("snapshot_every must be positive");
        }
        let n = self.horizon / self.tau;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return invalid(format!("T / tau = {n} is not an integer"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.tau).round() as usize
    }

    pub fn snapshot_interval(&self) -> usize {
        self.snapshot_every.unwrap_or_else(|| self.steps().div_ceil(200).max(1))
    }
}

/// Profiles recorded at one time.
#[derive(Debug, Clone)]
pub struct TdSnapshot {
    pub step: usize,
    pub t: f64,
    pub f: DensityProfile,
    pub v: ValueProfile,
    pub s: PolicyProfile,
}

#[derive(Debug, Clone)]
pub struct TdTrace {
    pub snapshots: Vec<TdSnapshot>,
    /// `t_k = k tau` for every step.
    pub times: Vec<f64>,
    /// `Y(t_k)` for every step.
    pub production: Vec<f64>,
    /// Trapezoid mass of `f` for every step.
    pub mass: Vec<f64>,
    pub converged: bool,
    pub outer_iterations: usize,
    /// `sup |Delta S|` after each outer iteration.
    pub policy_changes: Vec<f64>,
    /// Smallest density value over the run.
    pub min_density: f64,
    /// Largest increase of `S` in `x` over the recorded snapshots.
    pub max_policy_increase: f64,
}

impl TdTrace {
    pub fn max_mass_deviation(&self, reference: f64) -> f64 {
        self.mass.iter().fold(0.0f64, |m, v| m.max((v - reference).abs()))
    }
}

fn diffusion_matrix(cfg: &TdConfig) -> Tridiagonal {
    let g = &cfg.grid;
    let n = g.n_cells();
    let h = g.h();
    let w = g.weights();
    let mut t = Tridiagonal::zeros(n + 1);
    // Finite volumes for u = z^2 f with flux nu (u_{i+1} - u_i)/h and no flux
    // through either end; columns sum to the cell weights, so mass is exact.
    for (i, wi) in w.iter().enumerate() {
        let c = cfg.tau * cfg.nu / (wi * h);
        let zz = g.node(i).powi(2);
        t.diag[i] = 1.0;
        if i < n {
            t.diag[i] += c * zz;
            t.upper[i] = -c * g.node(i + 1).powi(2);
        }
        if i > 0 {
            t.diag[i] += c * zz;
            t.lower[i] = -c * g.node(i - 1).powi(2);
        }
    }
    t
}

fn boltzmann_with(t: &Tridiagonal, f: &[f64], s: &[f64], cfg: &TdConfig, w: &[f64]) -> Result<Vec<f64>> {
    let q = collision(f, s, &cfg.lf, w);
    let rhs: Vec<f64> = f.iter().zip(&q).map(|(fi, qi)| fi + cfg.tau * qi).collect();
    t.solve(&rhs)
}

/// Advances the density one step: `(I - tau nu D) f^{k+1} = f^k + tau g1(f^k, S^k)`.
pub fn boltzmann_step(f: &DensityProfile, s: &PolicyProfile, cfg: &TdConfig) -> Result<DensityProfile> {
    same_grid(f.grid(), s.grid())?;
    same_grid(f.grid(), &cfg.grid)?;
    let t = diffusion_matrix(cfg);
    let w = cfg.grid.weights();
    DensityProfile::new(cfg.grid, boltzmann_with(&t, f.values(), s.values(), cfg, &w)?)
}

fn hjb_matrix(cfg: &TdConfig) -> Tridiagonal {
    let g = &cfg.grid;
    let n = g.n_cells();
    let h = g.h();
    let mut t = Tridiagonal::zeros(n + 1);
    for i in 0..=n {
        let d = cfg.nu * g.node(i).powi(2) / (h * h);
        t.diag[i] = 1.0 / cfg.tau + cfg.r + 2.0 * d;
        // ghost nodes V_{-1} = V_1 and V_{N+1} = V_{N-1}
        if i == 0 {
            t.upper[i] = -2.0 * d;
        } else if i == n {
            t.lower[i] = -2.0 * d;
        } else {
            t.lower[i] = -d;
            t.upper[i] = -d;
        }
    }
    t
}

fn hjb_with(t: &Tridiagonal, v_next: &[f64], b: &[f64], s: &[f64], cfg: &TdConfig) -> Result<Vec<f64>> {
    let g = &cfg.grid;
    let rhs: Vec<f64> = (0..g.len())
        .map(|i| v_next[i] / cfg.tau + (1.0 - s[i]) * g.node(i) + cfg.lf.value(s[i]) * b[i])
        .collect();
    t.solve(&rhs)
}

/// One backward step: `(1/tau + r) V^k - nu z^2 D2 V^k = V^{k+1}/tau + H`,
/// `H = (1 - S) z + alpha(S) B(V^{k+1}, f^{k+1})`, Neumann at both ends.
pub fn hjb_step_backward(
    v_next: &ValueProfile,
    f_next: &DensityProfile,
    s: &PolicyProfile,
    cfg: &TdConfig,
) -> Result<ValueProfile> {
    same_grid(v_next.grid(), &cfg.grid)?;
    same_grid(s.grid(), &cfg.grid)?;
    let b = b_functional(v_next, f_next)?;
    let t = hjb_matrix(cfg);
    ValueProfile::new(cfg.grid, hjb_with(&t, v_next.values(), &b, s.values(), cfg)?)
}

/// Maximizing policy against `B(v, f)`.
pub fn policy_update(v: &ValueProfile, f: &DensityProfile, lf: &LearningFunction) -> Result<PolicyProfile> {
    let b = b_functional(v, f)?;
    policy_from_b(&b, v.grid(), lf)
}

fn policy_of(v: &[f64], f: &[f64], cfg: &TdConfig) -> Vec<f64> {
    let b = crate::profile::b_from_slices(v, f, cfg.grid.h());
    policy_from_b(&b, &cfg.grid, &cfg.lf)
        .expect("aligned by construction")
        .into_values()
}

/// `Y = int (1 - S) z f`.
pub(crate) fn production(f: &[f64], s: &[f64], grid: &UniformGrid) -> f64 {
    let y: Vec<f64> = (0..grid.len()).map(|i| (1.0 - s[i]) * grid.node(i) * f[i]).collect();
    trapezoid(&y, grid.h()).expect("grid has at least 3 nodes")
}

/// Policy at every level and value function at the snapshot steps.
type Sweep = (Vec<Vec<f64>>, Vec<(usize, Vec<f64>)>);

/// Backward sweep from `V(T) = 0`; returns the new policy at every level and
/// the value function at the snapshot steps.
fn backward<'a>(
    f: impl Fn(usize) -> &'a [f64],
    k_max: usize,
    cfg: &TdConfig,
    t: &Tridiagonal,
    every: usize,
) -> Result<Sweep> {
    let mut s_new = vec![Vec::new(); k_max + 1];
    let mut v = vec![0.0; cfg.grid.len()];
    let mut v_snap = Vec::new();
    s_new[k_max] = policy_of(&v, f(k_max), cfg);
    v_snap.push((k_max, v.clone()));
    for k in (0..k_max).rev() {
        let b = crate::profile::b_from_slices(&v, f(k + 1), cfg.grid.h());
        v = hjb_with(t, &v, &b, &s_new[k + 1], cfg)?;
        s_new[k] = policy_of(&v, f(k), cfg);
        if k % every == 0 {
            v_snap.push((k, v.clone()));
        }
    }
    v_snap.reverse();
    Ok((s_new, v_snap))
}

fn forward(f0: &[f64], s: &[Vec<f64>], cfg: &TdConfig, t: &Tridiagonal) -> Result<Vec<Vec<f64>>> {
    let w = cfg.grid.weights();
    let mut f = Vec::with_capacity(s.len());
    f.push(f0.to_vec());
    for k in 0..s.len() - 1 {
        let next = boltzmann_with(t, &f[k], &s[k], cfg, &w)?;
        f.push(next);
    }
    Ok(f)
}

/// Forward-backward iteration over `[0, T]`.
///
/// The starting policy is the best response to the initial density held
/// fixed over the horizon. Each outer iteration then runs the density
/// forward under the current policy, the value function backward, and
/// re-maximizes the policy at every level, until
/// `sup |Delta S| < outer_tol` or `max_outer` is reached.
pub fn run_td(cfg: &TdConfig, f0: &DensityProfile) -> Result<TdTrace> {
    cfg.validate()?;
    same_grid(f0.grid(), &cfg.grid)?;
    let k_max = cfg.steps();
    let every = cfg.snapshot_interval();
    let tf = diffusion_matrix(cfg);
    let th = hjb_matrix(cfg);
    let (mut s, _) = backward(|_| f0.values(), k_max, cfg, &th, every)?;
    let mut changes = Vec::new();
    let mut converged = false;
    let mut f;
    let mut v_snap;
    let mut outer = 0;
    loop {
        outer += 1;
        f = forward(f0.values(), &s, cfg, &tf)?;
        let (s_new, vs) = backward(|k| f[k].as_slice(), k_max, cfg, &th, every)?;
        v_snap = vs;
        let change = s
            .iter()
            .zip(&s_new)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, f64::max);
        changes.push(change);
        s = s_new;
        if change < cfg.outer_tol {
            converged = true;
            break;
        }
        if outer >= cfg.max_outer {
            break;
        }
    }
    let g = &cfg.grid;
    let times: Vec<f64> = (0..=k_max).map(|k| k as f64 * cfg.tau).collect();
    let production: Vec<f64> = (0..=k_max).map(|k| production(&f[k], &s[k], g)).collect();
    let mass: Vec<f64> = f.iter().map(|fk| trapezoid(fk, g.h()).unwrap()).collect();
    let min_density = f.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let mut snapshots = Vec::new();
    let mut max_policy_increase = 0.0f64;
    for (k, v) in v_snap {
        let sk = &s[k];
        max_policy_increase = sk.windows(2).fold(max_policy_increase, |m, w| m.max(w[1] - w[0]));
        snapshots.push(TdSnapshot {
            step: k,
            t: times[k],
            f: DensityProfile::new(*g, f[k].clone())?,
            v: ValueProfile::new(*g, v)?,
            s: PolicyProfile::new(*g, sk.clone())?,
        });
    }
    Ok(TdTrace {
        snapshots,
        times,
        production,
        mass,
        converged,
        outer_iterations: outer,
        policy_changes: changes,
        min_density,
        max_policy_increase,
    })
}

/// Snapshots of a Fisher-KPP run.
#[derive(Debug, Clone)]
pub struct KppTrace {
    pub y: Vec<f64>,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Solves `G_t - nu G_yy = alpha0 G (1 - G)` with `G = 1` at the left end
/// and `G = 0` at the right end: implicit diffusion, explicit reaction.
///
/// `y` must be uniformly spaced. A snapshot is kept every `snapshot_every`
/// steps (and at the end).
pub fn kpp_run(
    nu: f64,
    alpha0: f64,
    y: &[f64],
    g0: &[f64],
    tau: f64,
    horizon: f64,
    snapshot_every: usize,
) -> Result<KppTrace> {
    let m = y.len();
    if m < 3 || g0.len() != m {
        return invalid("KPP grid and initial data must have the same length (at least 3)");
    }
    let dy = (y[m - 1] - y[0]) / (m - 1) as f64;
    if !(dy > 0.0) || y.windows(2).any(|w| ((w[1] - w[0]) - dy).abs() > 1e-9 * dy.max(1.0)) {
        return invalid("KPP grid must be uniform and increasing");
    }
    if !(nu >= 0.0) || !(alpha0 >= 0.0) || !(tau > 0.0) || !(horizon > 0.0) || snapshot_every == 0 {
        return invalid("KPP parameters must satisfy nu >= 0, alpha0 >= 0, tau > 0, T > 0");
    }
    if tau * alpha0 > 0.25 {
        return invalid(format!("tau * alpha0 = {} exceeds 0.25", tau * alpha0));
    }
    if g0.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return invalid("initial front must take values in [0, 1]");
    }
    if g0.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return invalid("initial front must be non-increasing");
    }
    let steps = (horizon / tau).round() as usize;
    let d = nu * tau / (dy * dy);
    let mut t = Tridiagonal::zeros(m);
    t.diag[0] = 1.0;
    t.diag[m - 1] = 1.0;
    for i in 1..m - 1 {
        t.lower[i] = -d;
        t.upper[i] = -d;
        t.diag[i] = 1.0 + 2.0 * d;
    }
    let mut g = g0.to_vec();
    g[0] = 1.0;
    g[m - 1] = 0.0;
    let mut trace = KppTrace {
        y: y.to_vec(),
        times: vec![0.0],
        snapshots: vec![g.clone()],
        warnings: Vec::new(),
    };
    for k in 1..=steps {
        let mut rhs: Vec<f64> = g.iter().map(|&gi| gi + tau * alpha0 * gi * (1.0 - gi)).collect();
        rhs[0] = 1.0;
        rhs[m - 1] = 0.0;
        g = t.solve(&rhs)?;
        if k % snapshot_every == 0 || k == steps {
            if trace.warnings.is_empty() {
                if let Some(j) = g.iter().position(|&v| v < 0.5) {
                    if j <= 10 || j + 10 >= m - 1 {
                        trace.warnings.push(format!(
                            "front within 10 cells of the boundary at t = {}; results are truncated",
                            k as f64 * tau
                        ));
                    }
                }
            }
            trace.times.push(k as f64 * tau);
            trace.snapshots.push(g.clone());
        }
    }
    Ok(trace)
}
