//! Mode dispatch: runs a solver, writes its files, and builds the report.

use crate::config::{Initial, Mode, RunSpec, SweepKey};
use crate::output::{profile_name, write_csv};
use kgrowth::analytic::{constant_alpha_bgp, kpp_wave_speed, ParetoParams};
use kgrowth::bgp::{check_invariants, run_bgp, BgpConfig, BgpSolution};
use kgrowth::diagnostics::{
    bgp_degeneracy, bgp_production, front_position, front_speed, growth_rate_fit, pareto_fit, td_degeneracy, ParetoFit,
};
use kgrowth::ktransform::{check_bounds, gamma_from_k, pareto_k, solve_k, tail_limit};
use kgrowth::td::{kpp_run, run_td};
use kgrowth::{CdfProfile, DensityProfile, PolicyProfile, UniformGrid};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Solver(#[from] kgrowth::Error),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

/// What a run produced: the mode-specific results and whether every solver
/// reached its stopping criterion.
pub struct Outcome {
    pub results: Value,
    pub converged: bool,
}

pub fn execute(spec: &RunSpec, threads: Option<usize>) -> Result<Outcome, RunError> {
    let out = spec.out.as_path();
    match spec.mode {
        Mode::Td => td(spec, out),
        Mode::Bgp => bgp(spec, out),
        Mode::Ktransform => ktransform(spec, out),
        Mode::Kpp => kpp(spec, out),
        Mode::Analytic => analytic(spec, out),
        Mode::Sweep => sweep(spec, out, threads),
    }
}

fn fit_or_error(phi: &CdfProfile, window: Option<[f64; 2]>) -> Value {
    let r: kgrowth::Result<ParetoFit> = pareto_fit(phi, window.map(|[a, b]| (a, b)));
    match r {
        Ok(fit) => json!(fit),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn td(spec: &RunSpec, out: &Path) -> Result<Outcome, RunError> {
    let cfg = spec.td_config()?;
    let grid = cfg.grid;
    let f0 = match spec.initial {
        Initial::Gaussian => DensityProfile::truncated_gaussian(grid, spec.init_mean, spec.init_sd)?,
        Initial::Pareto => {
            let p = ParetoParams::new(spec.pareto_k.unwrap_or(1.0), spec.theta.expect("validated"))?;
            DensityProfile::from_fn(grid, |x| p.density(x))?.normalized()?
        }
    };
    let trace = run_td(&cfg, &f0)?;
    let x = grid.nodes();
    for s in &trace.snapshots {
        write_csv(
            &out.join(profile_name(s.t)),
            &["x", "f", "V", "S"],
            &[&x, s.f.values(), s.v.values(), s.s.values()],
        )?;
    }
    write_csv(
        &out.join("series.csv"),
        &["t", "Y", "mass"],
        &[&trace.times, &trace.production, &trace.mass],
    )?;
    let growth = growth_rate_fit(&trace.times, &trace.production, spec.growth_window)?;
    let last = trace.snapshots.last().expect("a run records its final state");
    let results = json!({
        "converged": trace.converged,
        "outer_iterations": trace.outer_iterations,
        "policy_changes": trace.policy_changes,
        "growth_fit": growth,
        "degeneracy": td_degeneracy(&trace),
        "max_mass_deviation": trace.max_mass_deviation(1.0),
        "min_density": trace.min_density,
        "max_policy_increase": trace.max_policy_increase,
        "final_pareto_fit": fit_or_error(&kgrowth::cdf_from_density(&last.f), spec.pareto_window),
        "snapshots": trace.snapshots.len(),
    });
    Ok(Outcome {
        results,
        converged: trace.converged,
    })
}

fn bgp_summary(sol: &BgpSolution, cfg: &BgpConfig, window: Option<[f64; 2]>) -> Value {
    json!({
        "converged": sol.converged,
        "degenerate": sol.degenerate,
        "iterations": sol.iterations,
        "last_change": sol.last_change,
        "gamma": sol.gamma,
        "x0": sol.x0.x0,
        "Y0": bgp_production(sol),
        "tail_mass": sol.tail_mass,
        "multiplier": sol.multiplier,
        "residuals": sol.residuals,
        "degeneracy": bgp_degeneracy(sol),
        "pareto_fit": fit_or_error(&sol.cdf, window),
        "invariants": check_invariants(sol, cfg),
        "warnings": sol.warnings,
    })
}

fn write_bgp_profiles(path: &Path, sol: &BgpSolution) -> std::io::Result<()> {
    let x = sol.phi.grid().nodes();
    write_csv(
        path,
        &["x", "phi", "v", "S"],
        &[&x, sol.phi.values(), sol.v.values(), sol.policy.values()],
    )
}

/// A finished solve counts as settled when it converged or collapsed onto
/// the degenerate path, which is a valid outcome.
fn settled(sol: &BgpSolution) -> bool {
    sol.converged || sol.degenerate
}

fn solve_bgp(spec: &RunSpec, key: Option<(SweepKey, f64)>) -> kgrowth::Result<(BgpSolution, BgpConfig)> {
    let cfg = spec.bgp_config_with(key)?;
    let (phi, v) = cfg.initial_guess()?;
    Ok((run_bgp(&cfg, &phi, &v)?, cfg))
}

fn bgp(spec: &RunSpec, out: &Path) -> Result<Outcome, RunError> {
    let (sol, cfg) = solve_bgp(spec, None)?;
    write_bgp_profiles(&out.join("profiles.csv"), &sol)?;
    Ok(Outcome {
        results: bgp_summary(&sol, &cfg, spec.pareto_window),
        converged: settled(&sol),
    })
}

fn sweep(spec: &RunSpec, out: &Path, threads: Option<usize>) -> Result<Outcome, RunError> {
    let key = spec.sweep_key;
    let run_all = || -> Vec<kgrowth::Result<(BgpSolution, BgpConfig)>> {
        spec.sweep_values
            .par_iter()
            .map(|&v| solve_bgp(spec, Some((key, v))))
            .collect()
    };
    let cells = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool with a positive size")
            .install(run_all),
        None => run_all(),
    };
    let mut summaries = Vec::new();
    let (mut gamma, mut x0, mut y0) = (Vec::new(), Vec::new(), Vec::new());
    let mut converged = true;
    for (i, (cell, &v)) in cells.into_iter().zip(&spec.sweep_values).enumerate() {
        let (sol, cfg) = cell?;
        let dir = out.join(format!("cell_{i:03}"));
        std::fs::create_dir_all(&dir)?;
        write_bgp_profiles(&dir.join("profiles.csv"), &sol)?;
        converged &= settled(&sol);
        gamma.push(sol.gamma);
        x0.push(sol.x0.x0);
        y0.push(bgp_production(&sol));
        let mut s = bgp_summary(&sol, &cfg, spec.pareto_window);
        s[key.name()] = json!(v);
        summaries.push(s);
    }
    write_csv(
        &out.join("series.csv"),
        &[key.name(), "gamma", "x0", "Y0"],
        &[&spec.sweep_values, &gamma, &x0, &y0],
    )?;
    let results = json!({
        "axis": key.name(),
        "gamma_strictly_increasing": gamma.windows(2).all(|w| w[1] > w[0]),
        "x0_non_increasing": x0.windows(2).all(|w| w[1] <= w[0]),
        "cells": summaries,
    });
    Ok(Outcome { results, converged })
}

fn ktransform(spec: &RunSpec, out: &Path) -> Result<Outcome, RunError> {
    let theta = spec.theta.expect("validated");
    let lf = spec.learning()?;
    let g = UniformGrid::new(spec.xt_max, spec.xt_cells)?;
    let s = PolicyProfile::constant(g, spec.s_tilde)?;
    let kp = solve_k(spec.k_tilde, &s, theta, &lf)?;
    write_csv(
        &out.join("ktransform.csv"),
        &["xt", "K", "I", "A"],
        &[kp.nodes(), kp.k(), kp.running(), kp.alpha_integral()],
    )?;
    let limit = tail_limit(&kp)?;
    let gamma = gamma_from_k(&kp)?;
    let results = json!({
        "gamma": gamma,
        "tail_limit": limit,
        "pareto_k": pareto_k(&kp, gamma),
        "alpha_one_theta": lf.alpha_one() * theta,
        "bounds": check_bounds(&kp),
        "constraint_defect": kp.constraint_defect(),
        "xt0": kp.xt0(),
        "nodes": kp.nodes().len(),
    });
    Ok(Outcome {
        results,
        converged: true,
    })
}

fn kpp(spec: &RunSpec, out: &Path) -> Result<Outcome, RunError> {
    let m = spec.y_cells;
    let dy = (spec.y_max - spec.y_min) / m as f64;
    let y: Vec<f64> = (0..=m).map(|i| spec.y_min + dy * i as f64).collect();
    let g0: Vec<f64> = y.iter().map(|&v| if v <= 0.0 { 1.0 } else { 0.0 }).collect();
    let steps = (spec.horizon / spec.tau).round() as usize;
    let every = spec.snapshot_every.unwrap_or_else(|| steps.div_ceil(200).max(1));
    let trace = kpp_run(spec.nu, spec.alpha0, &y, &g0, spec.tau, spec.horizon, every)?;
    let speed = front_speed(&trace.times, &trace.snapshots, &y, spec.level)?;
    let positions: Vec<f64> = trace
        .snapshots
        .iter()
        .map(|g| front_position(g, &y, spec.level).expect("checked by front_speed"))
        .collect();
    write_csv(&out.join("front.csv"), &["t", "position"], &[&trace.times, &positions])?;
    let k = trace.snapshots.len();
    let stride = (k - 1).div_ceil(10).max(1);
    for i in (0..k).filter(|&i| i % stride == 0 || i == k - 1) {
        write_csv(
            &out.join(profile_name(trace.times[i])),
            &["y", "G"],
            &[&y, &trace.snapshots[i]],
        )?;
    }
    let oracle = kpp_wave_speed(spec.nu, spec.alpha0);
    let results = json!({
        "front_speed": speed,
        "wave_speed": oracle,
        "relative_error": (speed - oracle).abs() / oracle,
        "warnings": trace.warnings,
    });
    Ok(Outcome {
        results,
        converged: true,
    })
}

fn analytic(spec: &RunSpec, out: &Path) -> Result<Outcome, RunError> {
    let p = ParetoParams::new(spec.pareto_k.unwrap_or(1.0), spec.theta.expect("validated"))?;
    let grid = spec.grid();
    let (gamma, phi) = constant_alpha_bgp(spec.alpha0, &p, &grid)?;
    let x = grid.nodes();
    let density: Vec<f64> = x.iter().map(|&x| p.density(x)).collect();
    write_csv(
        &out.join("profiles.csv"),
        &["x", "Phi", "phi"],
        &[&x, phi.values(), &density],
    )?;
    let results = json!({
        "gamma": gamma,
        "pareto_k": p.k(),
        "theta": p.theta(),
        "kpp_wave_speed": kpp_wave_speed(spec.nu, spec.alpha0),
    });
    Ok(Outcome {
        results,
        converged: true,
    })
}
