//! The tail transform `x~ = x^(-1/theta)`, `Phi(x) = 1 - (gamma/theta) K(x~) x~`.
//!
//! In the transformed variable the Pareto tail of `Phi` becomes the initial
//! value `K(0) = k~`, and the Boltzmann equation without diffusion becomes
//!
//! ```text
//! x~ K' = -K I,     I' = alpha(S~(x~)) (x~ K)' = alpha(S~) K (1 - I),
//! ```
//!
//! with `I(0) = 0`. `x~ K` increases to a finite limit `L` and `gamma = theta / L`.

use crate::error::{invalid, Error, Result};
use crate::grid::{trapezoid, UniformGrid};
use crate::learning::LearningFunction;
use crate::profile::{CdfProfile, DensityProfile, PolicyProfile};
use serde::Serialize;

const INVARIANT_TOL: f64 = 1e-8;
/// Largest geometric step `ln(b/a)` used past the uniform part.
const MAX_DLOG: f64 = 0.01;
/// Relative agreement of successive Richardson limits required by `gamma_from_k`.
const SATURATION_TOL: f64 = 1e-4;
/// Agreement at which the dyadic extension stops early.
const EXTENSION_TOL: f64 = 1e-10;
const MAX_EXTENT: f64 = 1e15;

/// Samples of `K`, the running integral `I`, and `A = int_0^x~ alpha(S~)`.
///
/// The first `uniform_len` nodes are the caller's grid; the rest are a
/// geometric tail extension whose last nodes double in `x~`.
#[derive(Debug, Clone, Serialize)]
pub struct KProfile {
    nodes: Vec<f64>,
    k: Vec<f64>,
    running: Vec<f64>,
    alpha_integral: Vec<f64>,
    policy: Vec<f64>,
    uniform_len: usize,
    dyadic: Vec<usize>,
    k_tilde: f64,
    theta: f64,
    alpha_one: f64,
    xt0: Option<f64>,
}

impl KProfile {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn k(&self) -> &[f64] {
        &self.k
    }
    /// `I(x~) = int_0^x~ alpha(S~) (K xi)' d xi`.
    pub fn running(&self) -> &[f64] {
        &self.running
    }
    pub fn alpha_integral(&self) -> &[f64] {
        &self.alpha_integral
    }
    /// `S~` at the nodes.
    pub fn policy(&self) -> &[f64] {
        &self.policy
    }
    /// Number of leading nodes that belong to the caller's grid.
    pub fn uniform_len(&self) -> usize {
        self.uniform_len
    }
    pub fn k_tilde(&self) -> f64 {
        self.k_tilde
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    /// Start of the region where `S~ = 1`; `None` if `S~ < 1` everywhere.
    pub fn xt0(&self) -> Option<f64> {
        self.xt0
    }
    /// `|1 - I|` at the last node.
    pub fn constraint_defect(&self) -> f64 {
        (1.0 - self.running.last().copied().unwrap_or(0.0)).abs()
    }
    fn product(&self, j: usize) -> f64 {
        self.nodes[j] * self.k[j]
    }
}

/// Default uniform extent `10^3 / (alpha(1) k~)`.
pub fn default_xt_max(k_tilde: f64, lf: &LearningFunction) -> f64 {
    1e3 / (lf.alpha_one() * k_tilde)
}

struct Integrator<'a> {
    lf: &'a LearningFunction,
    s_at: &'a dyn Fn(f64) -> f64,
    x: f64,
    y: [f64; 3],
    out: KProfile,
}

impl<'a> Integrator<'a> {
    fn new(k_tilde: f64, theta: f64, lf: &'a LearningFunction, s_at: &'a dyn Fn(f64) -> f64) -> Self {
        let s0 = s_at(0.0);
        let out = KProfile {
            nodes: vec![0.0],
            k: vec![k_tilde],
            running: vec![0.0],
            alpha_integral: vec![0.0],
            policy: vec![s0],
            uniform_len: 0,
            dyadic: Vec::new(),
            k_tilde,
            theta,
            alpha_one: lf.alpha_one(),
            xt0: None,
        };
        Self {
            lf,
            s_at,
            x: 0.0,
            y: [k_tilde, 0.0, 0.0],
            out,
        }
    }

    fn rhs(&self, x: f64, y: &[f64; 3]) -> [f64; 3] {
        let a = self.lf.value((self.s_at)(x));
        let (k, i) = (y[0], y[1]);
        // x K' = -K I has the removable limit K'(0) = -alpha(S~(0)) K(0)^2.
        let dk = if x > 0.0 { -k * i / x } else { -a * k * k };
        [dk, a * k * (1.0 - i), a]
    }

    fn rk4(&mut self, b: f64) {
        let (x, y) = (self.x, self.y);
        let h = b - x;
        let add = |y: &[f64; 3], k: &[f64; 3], c: f64| [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2]];
        let k1 = self.rhs(x, &y);
        let k2 = self.rhs(x + 0.5 * h, &add(&y, &k1, 0.5 * h));
        let k3 = self.rhs(x + 0.5 * h, &add(&y, &k2, 0.5 * h));
        let k4 = self.rhs(b, &add(&y, &k3, h));
        for c in 0..3 {
            self.y[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        self.x = b;
    }

    /// Integrates to `b` in `n_sub` steps (geometric when `geometric`) and
    /// records the node, checking every profile invariant.
    fn advance(&mut self, b: f64, n_sub: usize, geometric: bool) -> Result<()> {
        let a = self.x;
        let n_sub = n_sub.max(1);
        for m in 1..=n_sub {
            let t = m as f64 / n_sub as f64;
            let xm = if m == n_sub {
                b
            } else if geometric && a > 0.0 {
                a * (b / a).powf(t)
            } else {
                a + (b - a) * t
            };
            self.rk4(xm);
        }
        self.record()
    }

    fn geometric_to(&mut self, b: f64) -> Result<()> {
        let n = ((b / self.x).ln() / MAX_DLOG).ceil() as usize;
        self.advance(b, n, true)
    }

    fn record(&mut self) -> Result<()> {
        let [k, i, a] = self.y;
        let x = self.x;
        let fail = |reason: String| Err(Error::Integration { position: x, reason });
        let o = &self.out;
        let j = o.nodes.len() - 1;
        if !(k.is_finite() && i.is_finite()) {
            return fail("non-finite state".into());
        }
        if k <= 0.0 {
            return fail(format!("K = {k} is not positive"));
        }
        if k > o.k_tilde * (1.0 + INVARIANT_TOL) {
            return fail(format!("K = {k} exceeds k~ = {}", o.k_tilde));
        }
        if k > o.k[j] + INVARIANT_TOL * o.k_tilde {
            return fail("K increases".into());
        }
        let p_prev = o.product(j);
        if x * k < p_prev - INVARIANT_TOL * p_prev.max(1.0) {
            return fail("x~ K decreases".into());
        }
        if i > 1.0 + INVARIANT_TOL {
            return fail(format!("running integral I = {i} exceeds 1"));
        }
        let s = (self.s_at)(x);
        let o = &mut self.out;
        o.nodes.push(x);
        o.k.push(k);
        o.running.push(i);
        o.alpha_integral.push(a);
        o.policy.push(s);
        Ok(())
    }

    /// Doubles `x~` until the tail limit settles and `min_extent` is passed.
    fn extend(&mut self, min_extent: f64) -> Result<()> {
        self.out.dyadic.push(self.out.nodes.len() - 1);
        loop {
            let (a, b) = (self.x, 2.0 * self.x);
            let n = (2f64.ln() / MAX_DLOG).ceil() as usize;
            for m in 1..=n {
                let xm = if m == n { b } else { a * 2f64.powf(m as f64 / n as f64) };
                self.advance(xm, 1, true)?;
            }
            self.out.dyadic.push(self.out.nodes.len() - 1);
            if self.x >= min_extent {
                if let Ok((l1, l0)) = richardson_pair(&self.out) {
                    if (l1 - l0).abs() <= EXTENSION_TOL * l1.abs() {
                        break;
                    }
                }
            }
            if self.x >= MAX_EXTENT {
                break;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> KProfile {
        self.out.xt0 = threshold(&self.out.nodes, &self.out.policy);
        self.out
    }
}

fn threshold(nodes: &[f64], policy: &[f64]) -> Option<f64> {
    // S~ is non-decreasing, so the saturated set is a final run of nodes.
    let first_below = policy.iter().rposition(|&s| s < 1.0 - 1e-12);
    match first_below {
        None => Some(0.0),
        Some(j) if j + 1 < nodes.len() => Some(nodes[j + 1]),
        Some(_) => None,
    }
}

fn check_policy(s: &[f64]) -> Result<()> {
    if s.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return invalid("policy S~ leaves [0, 1]");
    }
    if let Some(j) = s.windows(2).position(|w| w[1] < w[0] - INVARIANT_TOL) {
        return invalid(format!("policy S~ decreases at node {}", j + 1));
    }
    Ok(())
}

/// Integrates the K-equation for a policy sampled on a uniform `x~` grid.
///
/// `S~` is interpolated linearly between samples and held at its last value
/// beyond the grid. After the grid the solution is continued on a geometric
/// extension until `x~ K` has saturated (at least to [`default_xt_max`]).
pub fn solve_k(k_tilde: f64, s_tilde: &PolicyProfile, theta: f64, lf: &LearningFunction) -> Result<KProfile> {
    if !(k_tilde.is_finite() && k_tilde > 0.0) {
        return Err(Error::Domain {
            name: "k_tilde",
            value: k_tilde,
            domain: "(0, inf)",
        });
    }
    check_theta(theta)?;
    check_policy(s_tilde.values())?;
    let grid = *s_tilde.grid();
    let s = s_tilde.values();
    let s_at = |x: f64| grid.interpolate(s, x);
    let mut it = Integrator::new(k_tilde, theta, lf, &s_at);
    for i in 1..grid.len() {
        it.advance(grid.node(i), 1, false)?;
    }
    it.out.uniform_len = grid.len();
    it.extend(default_xt_max(k_tilde, lf).max(2.0 * grid.x_max()))?;
    Ok(it.finish())
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            domain: "(0, 1)",
        })
    }
}

/// Quadratic extrapolation in `1/x~` through points at `X, X/2, X/4`.
fn richardson(kp: &KProfile, last: usize) -> f64 {
    let d = &kp.dyadic;
    let p = |m: usize| kp.product(d[last - m]);
    (8.0 * p(0) - 6.0 * p(1) + p(2)) / 3.0
}

fn richardson_pair(kp: &KProfile) -> Result<(f64, f64)> {
    let n = kp.dyadic.len();
    if n < 4 {
        return Err(Error::Extrapolation("fewer than four dyadic tail points".into()));
    }
    Ok((richardson(kp, n - 1), richardson(kp, n - 2)))
}

/// `lim x~ K(x~)` by Richardson extrapolation over the last dyadic points.
pub fn tail_limit(kp: &KProfile) -> Result<f64> {
    let (l1, l0) = richardson_pair(kp)?;
    let change = (l1 - l0).abs() / l1.abs();
    if !(change < SATURATION_TOL) || !l1.is_finite() || l1 <= 0.0 {
        return Err(Error::Extrapolation(format!(
            "relative change {change:.3e} of the extrapolated limit at x~ = {:.3e}; extend x~_max",
            kp.nodes.last().unwrap()
        )));
    }
    Ok(l1)
}

/// `gamma = theta / lim x~ K`, checked against
/// `alpha(1) >= gamma/theta >= 1 / (k~ x~0 + 1/alpha(1))`.
pub fn gamma_from_k(kp: &KProfile) -> Result<f64> {
    let l = tail_limit(kp)?;
    let gamma = kp.theta / l;
    let ratio = 1.0 / l;
    if ratio > kp.alpha_one * (1.0 + INVARIANT_TOL) {
        return Err(Error::Bound(format!(
            "gamma/theta = {ratio} exceeds alpha(1) = {}",
            kp.alpha_one
        )));
    }
    if let Some(x0) = kp.xt0 {
        let lower = 1.0 / (kp.k_tilde * x0 + 1.0 / kp.alpha_one);
        if ratio < lower * (1.0 - INVARIANT_TOL) {
            return Err(Error::Bound(format!(
                "gamma/theta = {ratio} is below 1/(k~ x~0 + 1/alpha(1)) = {lower}"
            )));
        }
    }
    Ok(gamma)
}

/// Outcome of the nodewise bound checks.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// Largest violation of `K >= 1/(1/k~ + int_0^x~ alpha(S~))`.
    pub lower_integral: f64,
    /// Largest violation of `K >= 1/(1/k~ + alpha(1) x~)`.
    pub lower_linear: f64,
    /// Largest violation of `K x~ <= k~ x~0 + 1/alpha(1)` past `x~0`.
    pub upper_product: f64,
    /// Largest violation of `I <= 1`.
    pub constraint: f64,
    pub holds: bool,
}

/// Checks the sandwich bounds on `K` at every node with tolerance `1e-8`.
pub fn check_bounds(kp: &KProfile) -> BoundReport {
    let kt = kp.k_tilde;
    let mut r = BoundReport {
        lower_integral: 0.0,
        lower_linear: 0.0,
        upper_product: 0.0,
        constraint: 0.0,
        holds: true,
    };
    let upper = kp.xt0.map(|x0| kt * x0 + 1.0 / kp.alpha_one);
    for j in 0..kp.nodes.len() {
        let (x, k) = (kp.nodes[j], kp.k[j]);
        let lo1 = 1.0 / (1.0 / kt + kp.alpha_integral[j]);
        let lo2 = 1.0 / (1.0 / kt + kp.alpha_one * x);
        r.lower_integral = r.lower_integral.max((lo1 - k) / lo1);
        r.lower_linear = r.lower_linear.max((lo2 - k) / lo2);
        if let (Some(x0), Some(u)) = (kp.xt0, upper) {
            if x >= x0 {
                r.upper_product = r.upper_product.max((x * k - u) / u);
            }
        }
        r.constraint = r.constraint.max(kp.running[j] - 1.0);
    }
    r.holds = r.lower_integral <= INVARIANT_TOL
        && r.lower_linear <= INVARIANT_TOL
        && r.upper_product <= INVARIANT_TOL
        && r.constraint <= INVARIANT_TOL;
    r
}

/// Cubic Hermite interpolation of `x~ K` at `xt` using the exact slopes
/// `(x~ K)' = K (1 - I)`, clipped to the cell values so the result stays
/// monotone. Past the last node the gap to the limit `l` decays like `1/x~`.
fn product_at(kp: &KProfile, xt: f64, l: f64) -> f64 {
    let n = kp.nodes.len();
    let last = kp.nodes[n - 1];
    if xt >= last {
        let p = kp.product(n - 1);
        return l + (p - l) * last / xt;
    }
    let j = kp.nodes.partition_point(|&v| v <= xt);
    let (a, b) = (kp.nodes[j - 1], kp.nodes[j]);
    let dx = b - a;
    let w = (xt - a) / dx;
    let (p0, p1) = (kp.product(j - 1), kp.product(j));
    let d0 = kp.k[j - 1] * (1.0 - kp.running[j - 1]) * dx;
    let d1 = kp.k[j] * (1.0 - kp.running[j]) * dx;
    let w2 = w * w;
    let w3 = w2 * w;
    let p = (2.0 * w3 - 3.0 * w2 + 1.0) * p0 + (w3 - 2.0 * w2 + w) * d0 + (-2.0 * w3 + 3.0 * w2) * p1 + (w3 - w2) * d1;
    p.clamp(p0.min(p1), p0.max(p1))
}

/// `Phi(x) = 1 - (gamma/theta) K(x~) x~` on an `x`-grid.
pub fn phi_from_k(kp: &KProfile, gamma: f64, grid: &UniformGrid) -> Result<CdfProfile> {
    if !(gamma > 0.0) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            domain: "(0, inf)",
        });
    }
    let c = gamma / kp.theta;
    let l = tail_limit(kp).unwrap_or(1.0 / c);
    let vals = grid
        .nodes()
        .into_iter()
        .map(|x| {
            if x <= 0.0 {
                0.0
            } else {
                let xt = x.powf(-1.0 / kp.theta);
                (1.0 - c * product_at(kp, xt, l)).clamp(0.0, 1.0)
            }
        })
        .collect();
    CdfProfile::new(*grid, vals)
}

/// Pareto coefficient `k = (gamma/theta) k~` of the reconstructed `Phi`.
pub fn pareto_k(kp: &KProfile, gamma: f64) -> f64 {
    gamma * kp.k_tilde / kp.theta
}

/// Tail-exact stationary Boltzmann solution for a given policy on `x`.
#[derive(Debug, Clone)]
pub struct TailExact {
    pub cdf: CdfProfile,
    /// Density scaled so that its trapezoid mass equals `Phi(x_max)`.
    pub density: DensityProfile,
    pub gamma: f64,
    pub k_tilde: f64,
    pub tail_mass: f64,
    pub profile: KProfile,
}

/// Solves the diffusion-free stationary Boltzmann equation for the policy
/// `s` by mapping it to `S~(x~) = S(x~^(-theta))` and integrating the
/// K-equation through the images of the grid nodes.
///
/// `k~` is adjusted so that the Pareto coefficient of the result equals
/// `k_target`; `k_tilde_guess` seeds that inner iteration.
pub fn tail_exact_boltzmann(
    s: &PolicyProfile,
    theta: f64,
    k_target: f64,
    k_tilde_guess: f64,
    lf: &LearningFunction,
) -> Result<TailExact> {
    check_theta(theta)?;
    let grid = *s.grid();
    let sv = s.values();
    if sv.windows(2).any(|w| w[1] > w[0] + INVARIANT_TOL) {
        return invalid("policy must be non-increasing in x");
    }
    let n = grid.n_cells();
    let s_at = |xt: f64| {
        if xt <= 0.0 {
            sv[n]
        } else {
            grid.interpolate(sv, xt.powf(-theta))
        }
    };
    let mapped: Vec<f64> = (1..=n).rev().map(|i| grid.node(i).powf(-1.0 / theta)).collect();
    let mut k_tilde = k_tilde_guess;
    let mut last = None;
    for _ in 0..100 {
        let mut it = Integrator::new(k_tilde, theta, lf, &s_at);
        it.advance(mapped[0], 50, false)?;
        for &xt in &mapped[1..] {
            it.geometric_to(xt)?;
        }
        it.out.uniform_len = 0;
        it.extend(1e3 * mapped[n - 1])?;
        let kp = it.finish();
        let l = tail_limit(&kp)?;
        let next = k_target * l;
        let done = ((next - k_tilde) / k_tilde).abs() < 1e-12;
        last = Some((kp, l));
        if done {
            break;
        }
        k_tilde = next;
    }
    let (kp, l) = last.expect("at least one pass");
    let gamma = theta / l;
    // node j of the profile is x_{n+1-j}, j = 1..=n
    let c = gamma / theta;
    let mut cdf = vec![0.0; grid.len()];
    let mut dens = vec![0.0; grid.len()];
    for i in 1..=n {
        let j = n + 1 - i;
        let (xt, k, run) = (kp.nodes[j], kp.k[j], kp.running[j]);
        cdf[i] = (1.0 - c * xt * k).clamp(0.0, 1.0);
        dens[i] = c / theta * k * (1.0 - run) * xt / grid.node(i);
    }
    let tail_mass = 1.0 - cdf[n];
    let m = trapezoid(&dens, grid.h())?;
    if !(m > 0.0) {
        return invalid("reconstructed density has no mass");
    }
    let scale = (1.0 - tail_mass) / m;
    dens.iter_mut().for_each(|d| *d *= scale);
    Ok(TailExact {
        cdf: CdfProfile::new(grid, cdf)?,
        density: DensityProfile::new(grid, dens)?,
        gamma,
        k_tilde: kp.k_tilde,
        tail_mass,
        profile: kp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ParetoParams;

    fn lf() -> LearningFunction {
        LearningFunction::new(0.075, 0.3).unwrap()
    }

    #[test]
    fn saturated_policy_matches_closed_form() {
        let g = UniformGrid::new(50.0, 50_000).unwrap();
        let s = PolicyProfile::constant(g, 1.0).unwrap();
        let kp = solve_k(1.0, &s, 0.3, &lf()).unwrap();
        for (x, k) in kp.nodes().iter().zip(kp.k()) {
            let exact = 1.0 / (1.0 + 0.075 * x);
            assert!(((k - exact) / exact).abs() < 1e-6);
        }
        let gamma = gamma_from_k(&kp).unwrap();
        assert!((gamma - 0.0225).abs() < 1e-3 * 0.0225);
        assert!(check_bounds(&kp).holds);
        assert!(kp.constraint_defect() < 1e-3);
        assert_eq!(kp.xt0(), Some(0.0));
    }

    #[test]
    fn idle_policy_keeps_k_constant() {
        let g = UniformGrid::new(10.0, 1000).unwrap();
        let s = PolicyProfile::constant(g, 0.0).unwrap();
        let kp = solve_k(2.0, &s, 0.5, &lf()).unwrap();
        assert!(kp.k().iter().all(|&k| (k - 2.0).abs() < 1e-14));
        assert!(kp.running().iter().all(|&i| i == 0.0));
        assert!(matches!(gamma_from_k(&kp), Err(Error::Extrapolation(_))));
    }

    #[test]
    fn lower_bound_for_ramp_policy() {
        let g = UniformGrid::new(40.0, 4000).unwrap();
        let s = PolicyProfile::from_fn(g, |x| (x / 20.0).min(1.0)).unwrap();
        let kp = solve_k(1.5, &s, 0.4, &lf()).unwrap();
        let r = check_bounds(&kp);
        assert!(r.holds, "{r:?}");
        assert_eq!(kp.xt0(), Some(20.0));
        let gamma = gamma_from_k(&kp).unwrap();
        assert!(gamma / 0.4 <= 0.075);
        assert!(kp.running().windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn rejects_decreasing_policy() {
        let g = UniformGrid::new(1.0, 10).unwrap();
        let s = PolicyProfile::from_fn(g, |x| 1.0 - x).unwrap();
        assert!(solve_k(1.0, &s, 0.3, &lf()).is_err());
    }

    #[test]
    fn phi_reconstruction_matches_pareto() {
        let g = UniformGrid::new(50.0, 50_000).unwrap();
        let s = PolicyProfile::constant(g, 1.0).unwrap();
        let kp = solve_k(1.0, &s, 0.3, &lf()).unwrap();
        let gamma = gamma_from_k(&kp).unwrap();
        let xg = UniformGrid::new(20.0, 1000).unwrap();
        let phi = phi_from_k(&kp, gamma, &xg).unwrap();
        let p = ParetoParams::new(0.075, 0.3).unwrap();
        for (v, x) in phi.values().iter().zip(xg.nodes()) {
            assert!((v - p.cdf(x)).abs() < 1e-6, "{x} {v} {}", p.cdf(x));
        }
        assert!(phi.check(0.0).is_ok());
        // k = (gamma/theta) k~ = alpha(1) k~
        assert!((pareto_k(&kp, gamma) - 0.075).abs() < 1e-8);
        // tail ratio at x = 1e4, where x~ = 1e4^(-1/0.3) is inside the uniform part
        let x: f64 = 1e4;
        let xt = x.powf(-1.0 / 0.3);
        let surv = gamma / 0.3 * product_at(&kp, xt, 0.3 / gamma);
        assert!((surv * x.powf(1.0 / 0.3) / 0.075 - 1.0).abs() < 1e-2);
        assert!(phi_from_k(&kp, 0.0, &xg).is_err());
    }

    #[test]
    fn tail_exact_constant_alpha() {
        let g = UniformGrid::new(20.0, 1000).unwrap();
        let lf = LearningFunction::constant(0.075).unwrap();
        let s = PolicyProfile::constant(g, 0.0).unwrap();
        let te = tail_exact_boltzmann(&s, 0.3, 1.0, 10.0, &lf).unwrap();
        let p = ParetoParams::new(1.0, 0.3).unwrap();
        assert!((te.gamma - 0.0225).abs() < 1e-9);
        assert!((te.k_tilde - 0.3 / 0.0225).abs() < 1e-6);
        for (i, x) in g.nodes().into_iter().enumerate().skip(5) {
            assert!(((te.cdf.values()[i] - p.cdf(x)) / p.cdf(x)).abs() < 1e-8);
        }
        assert!((te.tail_mass - p.survival(20.0)).abs() < 1e-9);
        assert!((te.density.mass() + te.tail_mass - 1.0).abs() < 1e-12);
    }
}
