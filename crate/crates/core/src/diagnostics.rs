//! Measurements on solver output: production, growth rate, tail exponent,
//! degeneracy, and front speed.

use crate::bgp::{origin_mass_fraction, BgpSolution};
use crate::error::{invalid, Error, Result};
use crate::profile::{same_grid, CdfProfile, DensityProfile, PolicyProfile};
use crate::td::TdTrace;
use serde::Serialize;

/// `Y = int (1 - S) x f dx`.
pub fn production(f: &DensityProfile, s: &PolicyProfile) -> Result<f64> {
    same_grid(f.grid(), s.grid())?;
    Ok(crate::td::production(f.values(), s.values(), f.grid()))
}

/// `(t_k, Y(t_k))` for every time step of a run.
pub fn production_series(trace: &TdTrace) -> Vec<(f64, f64)> {
    trace
        .times
        .iter()
        .copied()
        .zip(trace.production.iter().copied())
        .collect()
}

/// `Y_0` with `Y(t) = e^(gamma t) Y_0` along a balanced growth path.
pub fn bgp_production(sol: &BgpSolution) -> f64 {
    crate::td::production(sol.phi.values(), sol.policy.values(), sol.phi.grid())
}

/// Least-squares line `y = a + b x`; returns `(a, b, r2, rms residual)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (icpt, slope, r2, (ss_res / n).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub gamma_hat: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    /// `Y` non-decreasing over the window.
    pub monotone: bool,
    /// `false` when `Y <= 0` somewhere in the window; no fit is made then.
    pub positive: bool,
}

/// Fits `log Y = a + gamma t` over the last `window_fraction` of the series.
pub fn growth_rate_fit(t: &[f64], y: &[f64], window_fraction: f64) -> Result<GrowthReport> {
    if t.len() != y.len() || t.len() < 2 {
        return invalid("growth fit needs matching series with at least 2 samples");
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Domain {
            name: "window_fraction",
            value: window_fraction,
            domain: "(0, 1]",
        });
    }
    let n = t.len();
    let start = ((n as f64) * (1.0 - window_fraction)).floor() as usize;
    let start = start.min(n - 2);
    let (tw, yw) = (&t[start..], &y[start..]);
    let window = (tw[0], tw[tw.len() - 1]);
    let monotone = yw.windows(2).all(|w| w[1] >= w[0]);
    if yw.iter().any(|&v| !(v > 0.0)) {
        return Ok(GrowthReport {
            gamma_hat: 0.0,
            window,
            r_squared: 0.0,
            monotone,
            positive: false,
        });
    }
    let ly: Vec<f64> = yw.iter().map(|v| v.ln()).collect();
    let (_, slope, r2, _) = linear_fit(tw, &ly);
    Ok(GrowthReport {
        gamma_hat: slope,
        window,
        r_squared: r2,
        monotone,
        positive: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParetoFit {
    pub theta_hat: f64,
    pub k_hat: f64,
    pub window: (f64, f64),
    /// RMS residual of the log-log regression.
    pub residual: f64,
    /// Residual small enough for a power-law tail.
    pub is_pareto: bool,
}

/// Residual (in log units) above which a tail is reported as not Pareto.
pub const PARETO_RESIDUAL_LIMIT: f64 = 0.02;
const PARETO_SAMPLES: usize = 64;

/// Upper decade of the region where `1 - Phi` lies in `[1e-6, 1e-1]`:
/// `[max(x_a, x_b / 10), x_b]`.
pub fn default_pareto_window(phi: &CdfProfile) -> Option<(f64, f64)> {
    let g = phi.grid();
    let v = phi.values();
    let inside: Vec<usize> = (1..g.len())
        .filter(|&i| {
            let s = 1.0 - v[i];
            (1e-6..=1e-1).contains(&s)
        })
        .collect();
    let (&a, &b) = (inside.first()?, inside.last()?);
    let xb = g.node(b);
    Some((g.node(a).max(xb / 10.0), xb))
}

/// Regresses `log(1 - Phi)` on `log x` at log-spaced points of the window
/// (default: [`default_pareto_window`]); `theta = -1/slope`, `k = e^intercept`.
pub fn pareto_fit(phi: &CdfProfile, window: Option<(f64, f64)>) -> Result<ParetoFit> {
    let g = phi.grid();
    let (xa, xb) = match window {
        Some(w) => w,
        None => default_pareto_window(phi)
            .ok_or_else(|| Error::InvalidInput("1 - Phi never lies in [1e-6, 1e-1]".into()))?,
    };
    if !(xa > 0.0 && xb > xa && xb <= g.x_max()) {
        return invalid(format!("Pareto window [{xa}, {xb}] is not inside (0, x_max]"));
    }
    let nodes = (0..g.len()).filter(|&i| g.node(i) >= xa && g.node(i) <= xb).count();
    if nodes < 10 {
        return invalid(format!(
            "Pareto window holds {nodes} grid samples; at least 10 are needed"
        ));
    }
    let v = phi.values();
    let mut lx = Vec::with_capacity(PARETO_SAMPLES);
    let mut ls = Vec::with_capacity(PARETO_SAMPLES);
    let r = (xb / xa).ln();
    for j in 0..PARETO_SAMPLES {
        let x = xa * (r * j as f64 / (PARETO_SAMPLES - 1) as f64).exp();
        let surv = 1.0 - g.interpolate(v, x.min(g.x_max()));
        if !(surv > 0.0) {
            return invalid(format!("1 - Phi is not positive at x = {x}"));
        }
        lx.push(x.ln());
        ls.push(surv.ln());
    }
    let (icpt, slope, _, rms) = linear_fit(&lx, &ls);
    if !(slope < 0.0) {
        return invalid("survival function does not decay over the window");
    }
    Ok(ParetoFit {
        theta_hat: -1.0 / slope,
        k_hat: icpt.exp(),
        window: (xa, xb),
        residual: rms,
        is_pareto: rms <= PARETO_RESIDUAL_LIMIT,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    pub degenerate: bool,
    /// Share of the mass in the first 5% of the grid.
    pub origin_mass: f64,
    /// `Y` strictly decreasing over the last quarter, when a series is given.
    pub production_decreasing: Option<bool>,
    /// `gamma < 1e-8`, when a growth rate is given.
    pub gamma_vanishing: Option<bool>,
}

/// Flags collapse toward the trivial path: mass piled at the origin,
/// shrinking production, or a vanishing growth rate.
pub fn degeneracy_check(density: &DensityProfile, production: Option<&[f64]>, gamma: Option<f64>) -> DegeneracyReport {
    let origin_mass = origin_mass_fraction(density);
    let production_decreasing = production.map(|y| {
        let start = y.len() * 3 / 4;
        y.len() - start >= 2 && y[start..].windows(2).all(|w| w[1] < w[0])
    });
    let gamma_vanishing = gamma.map(|g| g < 1e-8);
    DegeneracyReport {
        degenerate: origin_mass > 0.9 || production_decreasing == Some(true) || gamma_vanishing == Some(true),
        origin_mass,
        production_decreasing,
        gamma_vanishing,
    }
}

/// [`degeneracy_check`] on the final density and the production series.
pub fn td_degeneracy(trace: &TdTrace) -> DegeneracyReport {
    let f = &trace.snapshots.last().expect("a run records its final state").f;
    degeneracy_check(f, Some(&trace.production), None)
}

/// [`degeneracy_check`] on a balanced growth path.
pub fn bgp_degeneracy(sol: &BgpSolution) -> DegeneracyReport {
    let mut r = degeneracy_check(&sol.phi, None, Some(sol.gamma));
    r.degenerate |= sol.degenerate;
    r
}

/// Position of the single `level` crossing of `g` over nodes `y`, by linear
/// interpolation; `None` unless there is exactly one crossing.
pub fn front_position(g: &[f64], y: &[f64], level: f64) -> Option<f64> {
    let mut hit = None;
    let mut count = 0;
    for j in 0..g.len().saturating_sub(1) {
        let (a, b) = (g[j] - level, g[j + 1] - level);
        if a == 0.0 || a * b < 0.0 {
            count += 1;
            hit = Some(if a == 0.0 {
                y[j]
            } else {
                y[j] + (y[j + 1] - y[j]) * a / (a - b)
            });
        }
    }
    if g.last() == Some(&level) {
        count += 1;
        hit = y.last().copied();
    }
    if count == 1 {
        hit
    } else {
        None
    }
}

/// Speed of the `level` crossing, fitted over the second half of the run.
pub fn front_speed(times: &[f64], snapshots: &[Vec<f64>], y: &[f64], level: f64) -> Result<f64> {
    if times.len() != snapshots.len() || times.len() < 2 {
        return invalid("front speed needs one time per snapshot and at least 2 snapshots");
    }
    let mut pos = Vec::with_capacity(times.len());
    for (k, g) in snapshots.iter().enumerate() {
        if g.len() != y.len() {
            return invalid(format!("snapshot {k} does not match the grid"));
        }
        pos.push(front_position(g, y, level).ok_or(Error::NonMonotone { index: k })?);
    }
    let t_mid = 0.5 * (times[0] + times[times.len() - 1]);
    let start = times.iter().position(|&t| t >= t_mid).unwrap_or(0).min(times.len() - 2);
    let (_, slope, _, _) = linear_fit(&times[start..], &pos[start..]);
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;

    #[test]
    fn production_examples() {
        let g = UniformGrid::new(1.0, 100).unwrap();
        let f = DensityProfile::new(g, vec![1.0; 101]).unwrap();
        let one = PolicyProfile::constant(g, 1.0).unwrap();
        assert_eq!(production(&f, &one).unwrap(), 0.0);
        let zero = PolicyProfile::constant(g, 0.0).unwrap();
        assert!((production(&f, &zero).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn growth_fit_examples() {
        let t: Vec<f64> = (0..=400).map(|k| k as f64 * 0.25).collect();
        let y: Vec<f64> = t.iter().map(|t| (0.1 * t).exp()).collect();
        let r = growth_rate_fit(&t, &y, 0.25).unwrap();
        assert!((r.gamma_hat - 0.1).abs() < 1e-10);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
        assert!(r.monotone && r.positive);
        assert!((r.window.0 - 75.0).abs() < 1e-12 && r.window.1 == 100.0);
        let r = growth_rate_fit(&t, &vec![3.0; t.len()], 0.25).unwrap();
        assert_eq!(r.gamma_hat, 0.0);
        let mut y = y;
        y[390] = 0.0;
        let r = growth_rate_fit(&t, &y, 0.25).unwrap();
        assert!(!r.positive);
    }

    fn cdf_on(g: UniformGrid, f: impl Fn(f64) -> f64) -> CdfProfile {
        CdfProfile::from_fn(g, |x| if x == 0.0 { 0.0 } else { f(x) }).unwrap()
    }

    #[test]
    fn pareto_examples() {
        let g = UniformGrid::new(10_000.0, 100_000).unwrap();
        let phi = cdf_on(g, |x| 1.0 / (1.0 + 2.0 * x.powi(-2)));
        let fit = pareto_fit(&phi, Some((100.0, 10_000.0))).unwrap();
        assert!((fit.theta_hat - 0.5).abs() < 0.01);
        assert!((fit.k_hat - 2.0).abs() < 0.04);
        let g = UniformGrid::new(50.0, 5000).unwrap();
        let exact = cdf_on(g, |x| 1.0 - 0.3 * x.powf(-1.0 / 0.4));
        let fit = pareto_fit(&exact, Some((5.0, 50.0))).unwrap();
        // only interpolation between grid nodes separates these from exact
        assert!((fit.theta_hat - 0.4).abs() < 1e-5);
        assert!((fit.k_hat - 0.3).abs() < 1e-5);
        assert!(fit.residual < 1e-5 && fit.is_pareto);
        assert!(pareto_fit(&exact, Some((5.0, 5.05))).is_err());
    }

    #[test]
    fn gaussian_tail_is_not_pareto() {
        let g = UniformGrid::new(8.0, 8000).unwrap();
        let erfc = |x: f64| {
            // survival of N(0,1) by quadrature of the density
            let n = 4000;
            let hi = 12.0;
            let h = (hi - x) / n as f64;
            let d = |u: f64| (-(u * u) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * d(x + k as f64 * h)
                })
                .sum::<f64>()
                * h
        };
        let phi = cdf_on(g, |x| 1.0 - erfc(x));
        let fit = pareto_fit(&phi, None).unwrap();
        assert!(!fit.is_pareto, "{fit:?}");
    }

    #[test]
    fn degeneracy_examples() {
        let g = UniformGrid::new(20.0, 1000).unwrap();
        let f = DensityProfile::truncated_gaussian(g, 5.0, 1.0).unwrap();
        let r = degeneracy_check(&f, None, None);
        assert!(!r.degenerate);
        let spike = DensityProfile::truncated_gaussian(g, 0.0, 0.1).unwrap();
        assert!(degeneracy_check(&spike, None, None).degenerate);
        let y: Vec<f64> = (0..100).map(|k| 10.0 - k as f64 * 0.01).collect();
        assert!(degeneracy_check(&f, Some(&y), None).degenerate);
        assert!(degeneracy_check(&f, None, Some(0.0)).degenerate);
        assert!(!degeneracy_check(&f, None, Some(0.01)).degenerate);
    }

    #[test]
    fn front_speed_translation_and_reflection() {
        let y: Vec<f64> = (0..=2000).map(|i| -10.0 + 0.02 * i as f64).collect();
        let times: Vec<f64> = (0..=50).map(|k| k as f64).collect();
        let shape = |u: f64| 0.5 * (1.0 - u.tanh());
        let right: Vec<Vec<f64>> = times
            .iter()
            .map(|t| y.iter().map(|&v| shape(v - 0.1 * t)).collect())
            .collect();
        assert!((front_speed(&times, &right, &y, 0.5).unwrap() - 0.1).abs() < 1e-6);
        let left: Vec<Vec<f64>> = times
            .iter()
            .map(|t| y.iter().map(|&v| shape(-(v + 0.1 * t))).collect())
            .collect();
        assert!((front_speed(&times, &left, &y, 0.5).unwrap() + 0.1).abs() < 1e-6);
        let mut bad = right.clone();
        bad[7] = y.iter().map(|v| 0.5 + 0.4 * v.sin()).collect();
        assert_eq!(front_speed(&times, &bad, &y, 0.5), Err(Error::NonMonotone { index: 7 }));
    }
}
