use kgrowth::bgp::{bgp_phi_step, check_invariants, run_bgp, BgpConfig, RightBoundary};
use kgrowth::diagnostics::{bgp_degeneracy, bgp_production, pareto_fit};
use kgrowth::{LearningFunction, PolicyProfile, UniformGrid};

fn grid() -> UniformGrid {
    UniformGrid::new(20.0, 1000).unwrap()
}

#[test]
fn coupled_without_diffusion_meets_every_check() {
    let lf = LearningFunction::new(0.075, 0.3).unwrap();
    let cfg = BgpConfig::new(grid(), 0.0, 0.05, lf, Some(0.3)).unwrap();
    let (p, v) = cfg.initial_guess().unwrap();
    let sol = run_bgp(&cfg, &p, &v).unwrap();
    assert!(sol.converged && !sol.degenerate);
    for c in check_invariants(&sol, &cfg) {
        assert!(c.pass, "{c:?}");
    }
    assert!(sol.gamma > 0.0 && sol.gamma <= 0.3 * 0.075);
    assert!(sol.residuals.gamma_tail_defect.unwrap() < 1e-4);
    assert!(sol.x0.x0 > 0.0);
    assert!(bgp_production(&sol) > 0.0);
    assert!(!bgp_degeneracy(&sol).degenerate);
}

#[test]
fn pareto_tail_is_imposed_without_diffusion() {
    let lf = LearningFunction::constant(0.075).unwrap();
    let mut cfg = BgpConfig::new(UniformGrid::new(2000.0, 20_000).unwrap(), 0.0, 0.05, lf, Some(0.5)).unwrap();
    cfg.pareto_k = Some(2.0);
    let (p, v) = cfg.initial_guess().unwrap();
    let sol = run_bgp(&cfg, &p, &v).unwrap();
    let fit = pareto_fit(&sol.cdf, None).unwrap();
    assert!(
        (fit.theta_hat - 0.5).abs() < 0.01 && (fit.k_hat - 2.0).abs() < 0.04,
        "{fit:?}"
    );
}

#[test]
fn growth_rises_with_diffusion() {
    let lf = LearningFunction::new(0.005, 0.5).unwrap();
    let mut last = 0.0;
    for nu in [0.01, 0.05, 0.1] {
        let cfg = BgpConfig::new(grid(), nu, 0.1, lf, None).unwrap();
        let (p, v) = cfg.initial_guess().unwrap();
        let sol = run_bgp(&cfg, &p, &v).unwrap();
        assert!(sol.converged);
        assert!((sol.phi.mass() - 1.0).abs() < 1e-8);
        assert!(sol.residuals.gamma_defect < 1e-4);
        assert!(sol.gamma > last);
        last = sol.gamma;
    }
}

#[test]
fn far_field_boundary_keeps_value_above_idle_value() {
    let lf = LearningFunction::new(0.005, 0.5).unwrap();
    let mut cfg = BgpConfig::new(grid(), 0.05, 0.1, lf, None).unwrap();
    cfg.right_bc = RightBoundary::FarField;
    let (p, v) = cfg.initial_guess().unwrap();
    let sol = run_bgp(&cfg, &p, &v).unwrap();
    let below = check_invariants(&sol, &cfg)
        .into_iter()
        .find(|c| c.name == "v_below_x_over_r")
        .unwrap();
    assert!(below.pass, "{below:?}");
}

#[test]
fn phi_step_keeps_unit_mass() {
    let lf = LearningFunction::new(0.005, 0.5).unwrap();
    let cfg = BgpConfig::new(grid(), 0.05, 0.1, lf, None).unwrap();
    let (p, _) = cfg.initial_guess().unwrap();
    let s = PolicyProfile::from_fn(grid(), |x| (1.0 - x / 20.0).powi(2)).unwrap();
    let step = bgp_phi_step(&p, &s, 0.02, &cfg).unwrap();
    assert!((step.phi.mass() - 1.0).abs() < 1e-12);
    assert_eq!(step.phi.values()[0], 0.0);
}

#[test]
fn residuals_are_at_fixed_point_scale() {
    for (nu, theta, lf) in [
        (0.0, Some(0.3), LearningFunction::new(0.075, 0.3).unwrap()),
        (0.05, None, LearningFunction::new(0.005, 0.5).unwrap()),
    ] {
        let r = if nu == 0.0 { 0.05 } else { 0.1 };
        let cfg = BgpConfig::new(grid(), nu, r, lf, theta).unwrap();
        let (p, v) = cfg.initial_guess().unwrap();
        let sol = run_bgp(&cfg, &p, &v).unwrap();
        assert!(sol.converged);
        assert!(sol.residuals.boltzmann <= 10.0 * cfg.tol, "{:?}", sol.residuals);
        assert!(sol.residuals.hjb <= 10.0 * cfg.tol, "{:?}", sol.residuals);
    }
}

#[test]
fn fixed_point_does_not_depend_on_relaxation() {
    for (nu, theta, lf, r) in [
        (0.0, Some(0.3), LearningFunction::new(0.075, 0.3).unwrap(), 0.05),
        (0.05, None, LearningFunction::new(0.005, 0.5).unwrap(), 0.1),
    ] {
        let mut sols = Vec::new();
        for omega in [0.5, 0.75, 1.0] {
            let mut cfg = BgpConfig::new(grid(), nu, r, lf, theta).unwrap();
            cfg.omega = omega;
            let (p, v) = cfg.initial_guess().unwrap();
            let sol = run_bgp(&cfg, &p, &v).unwrap();
            if sol.converged {
                sols.push(sol);
            }
        }
        assert!(sols.len() >= 2, "nu = {nu}");
        let base = &sols[0];
        let vmax = base.v.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let pmax = base.phi.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for s in &sols[1..] {
            assert!((s.gamma - base.gamma).abs() <= 1e-5 * base.gamma);
            for (a, b) in s.v.values().iter().zip(base.v.values()) {
                assert!((a - b).abs() <= 1e-5 * vmax);
            }
            for (a, b) in s.phi.values().iter().zip(base.phi.values()) {
                assert!((a - b).abs() <= 1e-5 * pmax);
            }
        }
    }
}
