//! Run configuration: a flat TOML table, overridden key by key from the
//! command line, resolved against defaults and validated in one pass.

use clap::ValueEnum;
use kgrowth::bgp::{BgpConfig, RightBoundary};
use kgrowth::td::TdConfig;
use kgrowth::{LearningFunction, UniformGrid};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Td,
    Bgp,
    Ktransform,
    Kpp,
    Analytic,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    Gaussian,
    Pareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKey {
    Nu,
    R,
    Alpha0,
    N,
}

impl SweepKey {
    pub fn name(self) -> &'static str {
        match self {
            SweepKey::Nu => "nu",
            SweepKey::R => "r",
            SweepKey::Alpha0 => "alpha0",
            SweepKey::N => "n",
        }
    }
}

/// Keys accepted in a config file or as `--key=value`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    mode: Option<Mode>,
    out: Option<PathBuf>,
    x_max: Option<f64>,
    n_cells: Option<usize>,
    alpha0: Option<f64>,
    n: Option<f64>,
    r: Option<f64>,
    nu: Option<f64>,
    tau: Option<f64>,
    horizon: Option<f64>,
    snapshot_every: Option<usize>,
    outer_tol: Option<f64>,
    max_outer: Option<usize>,
    initial: Option<Initial>,
    init_mean: Option<f64>,
    init_sd: Option<f64>,
    theta: Option<f64>,
    pareto_k: Option<f64>,
    omega: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    right_bc: Option<RightBoundary>,
    eps_hjb: Option<f64>,
    k_tilde: Option<f64>,
    s_tilde: Option<f64>,
    xt_max: Option<f64>,
    xt_cells: Option<usize>,
    y_min: Option<f64>,
    y_max: Option<f64>,
    y_cells: Option<usize>,
    level: Option<f64>,
    sweep_key: Option<SweepKey>,
    sweep_values: Option<Vec<f64>>,
    growth_window: Option<f64>,
    pareto_window: Option<[f64; 2]>,
}

/// Fully resolved run description. Serialized verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub mode: Mode,
    pub out: PathBuf,
    pub x_max: f64,
    pub n_cells: usize,
    pub alpha0: f64,
    /// Exponent of `alpha(s) = alpha0 s^n`; `0` selects constant `alpha0`.
    pub n: f64,
    pub r: f64,
    pub nu: f64,
    pub tau: f64,
    pub horizon: f64,
    pub snapshot_every: Option<usize>,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub initial: Initial,
    pub init_mean: f64,
    pub init_sd: f64,
    pub theta: Option<f64>,
    pub pareto_k: Option<f64>,
    pub omega: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub right_bc: RightBoundary,
    pub eps_hjb: f64,
    pub k_tilde: f64,
    pub s_tilde: f64,
    pub xt_max: f64,
    pub xt_cells: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub y_cells: usize,
    pub level: f64,
    pub sweep_key: SweepKey,
    pub sweep_values: Vec<f64>,
    pub growth_window: f64,
    pub pareto_window: Option<[f64; 2]>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

/// Turns `key=value` into a TOML entry. Values that are not valid TOML are
/// taken as bare strings, so `--mode=td` works without quotes.
fn override_value(key: &str, value: &str) -> Result<toml::Value, ConfigError> {
    let key = key.replace('-', "_");
    if key.is_empty() {
        return Err(ConfigError::Parse(format!("malformed override `{value}`")));
    }
    match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => Ok(t.remove("v").expect("parsed table holds the key")),
        Err(_) => Ok(toml::Value::String(value.to_string())),
    }
}

/// Reads the optional config file, applies `(key, value)` overrides, then
/// resolves defaults and validates.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
    mode: Option<Mode>,
    out: Option<&Path>,
) -> Result<RunSpec, ConfigError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                path: p.to_path_buf(),
                source,
            })?;
            text.parse::<toml::Table>()
                .map_err(|e| ConfigError::Parse(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for (k, v) in overrides {
        table.insert(k.replace('-', "_"), override_value(k, v)?);
    }
    if let Some(m) = mode {
        table.insert("mode".into(), toml::Value::String(format!("{m:?}").to_lowercase()));
    }
    if let Some(o) = out {
        table.insert("out".into(), toml::Value::String(o.to_string_lossy().into_owned()));
    }
    let raw: Raw = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
    let spec = resolve(raw)?;
    let problems = validate(&spec);
    if problems.is_empty() {
        Ok(spec)
    } else {
        Err(ConfigError::Invalid(problems))
    }
}

fn resolve(raw: Raw) -> Result<RunSpec, ConfigError> {
    let mode = raw.mode.ok_or_else(|| {
        ConfigError::Invalid(vec!["mode: required (td, bgp, ktransform, kpp, analytic, sweep)".into()])
    })?;
    Ok(RunSpec {
        mode,
        out: raw.out.unwrap_or_else(|| PathBuf::from("kgrowth-out")),
        x_max: raw.x_max.unwrap_or(20.0),
        n_cells: raw.n_cells.unwrap_or(1000),
        alpha0: raw.alpha0.unwrap_or(0.075),
        n: raw.n.unwrap_or(0.3),
        r: raw.r.unwrap_or(0.05),
        nu: raw.nu.unwrap_or(0.005),
        tau: raw.tau.unwrap_or(0.05),
        horizon: raw.horizon.unwrap_or(100.0),
        snapshot_every: raw.snapshot_every,
        outer_tol: raw.outer_tol.unwrap_or(1e-6),
        max_outer: raw.max_outer.unwrap_or(200),
        initial: raw.initial.unwrap_or(Initial::Gaussian),
        init_mean: raw.init_mean.unwrap_or(5.0),
        init_sd: raw.init_sd.unwrap_or(1.0),
        theta: raw.theta,
        pareto_k: raw.pareto_k,
        omega: raw.omega.unwrap_or(0.75),
        tol: raw.tol.unwrap_or(1e-8),
        max_iters: raw.max_iters.unwrap_or(5000),
        right_bc: raw.right_bc.unwrap_or_default(),
        eps_hjb: raw.eps_hjb.unwrap_or(0.0),
        k_tilde: raw.k_tilde.unwrap_or(1.0),
        s_tilde: raw.s_tilde.unwrap_or(1.0),
        xt_max: raw.xt_max.unwrap_or(50.0),
        xt_cells: raw.xt_cells.unwrap_or(50_000),
        y_min: raw.y_min.unwrap_or(-10.0),
        y_max: raw.y_max.unwrap_or(110.0),
        y_cells: raw.y_cells.unwrap_or(4800),
        level: raw.level.unwrap_or(0.5),
        sweep_key: raw.sweep_key.unwrap_or(SweepKey::Nu),
        sweep_values: raw.sweep_values.unwrap_or_else(|| vec![0.01, 0.05, 0.1]),
        growth_window: raw.growth_window.unwrap_or(0.25),
        pareto_window: raw.pareto_window,
    })
}

fn validate(s: &RunSpec) -> Vec<String> {
    let mut p = Vec::new();
    let mut need = |ok: bool, msg: String| {
        if !ok {
            p.push(msg);
        }
    };
    let pos = |v: f64| v.is_finite() && v > 0.0;
    need(pos(s.x_max), format!("x_max: must be positive, got {}", s.x_max));
    need(
        s.n_cells >= 2,
        format!("n_cells: must be at least 2, got {}", s.n_cells),
    );
    need(pos(s.alpha0), format!("alpha0: must be positive, got {}", s.alpha0));
    need((0.0..1.0).contains(&s.n), format!("n: must lie in [0, 1), got {}", s.n));
    need(pos(s.r), format!("r: must be positive, got {}", s.r));
    need(
        s.nu.is_finite() && s.nu >= 0.0,
        format!("nu: must be non-negative, got {}", s.nu),
    );
    if let Some(t) = s.theta {
        need(t > 0.0 && t < 1.0, format!("theta: must lie in (0, 1), got {t}"));
    }
    if let Some(k) = s.pareto_k {
        need(pos(k), format!("pareto_k: must be positive, got {k}"));
    }
    need(
        s.growth_window > 0.0 && s.growth_window <= 1.0,
        format!("growth_window: must lie in (0, 1], got {}", s.growth_window),
    );
    if let Some([a, b]) = s.pareto_window {
        need(
            a > 0.0 && b > a,
            format!("pareto_window: need 0 < lower < upper, got [{a}, {b}]"),
        );
    }
    let time = |p: &mut Vec<String>| {
        if !pos(s.tau) {
            p.push(format!("tau: must be positive, got {}", s.tau));
        }
        if !pos(s.horizon) {
            p.push(format!("horizon: must be positive, got {}", s.horizon));
        } else if pos(s.tau) {
            let steps = s.horizon / s.tau;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                p.push(format!(
                    "horizon: must be a whole number of steps tau = {}, got {}",
                    s.tau, s.horizon
                ));
            }
        }
        if s.snapshot_every == Some(0) {
            p.push("snapshot_every: must be positive".into());
        }
    };
    let bgp = |p: &mut Vec<String>, nu: f64, in_sweep: bool| {
        if nu == 0.0 && s.theta.is_none() {
            p.push("theta: required for a balanced growth path with nu = 0".into());
        }
        if nu > 0.0 && !in_sweep {
            if s.theta.is_some() {
                p.push("theta: only used when nu = 0; remove it".into());
            }
            if s.pareto_k.is_some() {
                p.push("pareto_k: only used when nu = 0; remove it".into());
            }
        }
        if !(s.omega > 0.0 && s.omega <= 1.0) {
            p.push(format!("omega: must lie in (0, 1], got {}", s.omega));
        }
        if !pos(s.tol) {
            p.push(format!("tol: must be positive, got {}", s.tol));
        }
        if s.max_iters == 0 {
            p.push("max_iters: must be positive".into());
        }
        if !(s.eps_hjb >= 0.0) {
            p.push(format!("eps_hjb: must be non-negative, got {}", s.eps_hjb));
        }
    };
    match s.mode {
        Mode::Td => {
            time(&mut p);
            if !pos(s.outer_tol) {
                p.push(format!("outer_tol: must be positive, got {}", s.outer_tol));
            }
            if s.max_outer == 0 {
                p.push("max_outer: must be positive".into());
            }
            match s.initial {
                Initial::Gaussian => {
                    if !pos(s.init_sd) {
                        p.push(format!("init_sd: must be positive, got {}", s.init_sd));
                    }
                }
                Initial::Pareto => {
                    if s.theta.is_none() {
                        p.push("theta: required for a Pareto initial density".into());
                    }
                }
            }
        }
        Mode::Bgp => bgp(&mut p, s.nu, false),
        Mode::Sweep => {
            if s.sweep_values.is_empty() {
                p.push("sweep_values: must not be empty".into());
            }
            for &v in &s.sweep_values {
                let nu = if s.sweep_key == SweepKey::Nu { v } else { s.nu };
                let bad = match s.sweep_key {
                    SweepKey::Nu => !(v.is_finite() && v >= 0.0),
                    SweepKey::R | SweepKey::Alpha0 => !pos(v),
                    SweepKey::N => !(0.0..1.0).contains(&v),
                };
                if bad {
                    p.push(format!("sweep_values: {v} is not a valid {}", s.sweep_key.name()));
                }
                if nu.is_finite() && nu >= 0.0 {
                    bgp(&mut p, nu, true);
                }
            }
        }
        Mode::Ktransform => {
            if s.theta.is_none() {
                p.push("theta: required for the tail transform".into());
            }
            if !pos(s.k_tilde) {
                p.push(format!("k_tilde: must be positive, got {}", s.k_tilde));
            }
            if !(0.0..=1.0).contains(&s.s_tilde) {
                p.push(format!("s_tilde: must lie in [0, 1], got {}", s.s_tilde));
            }
            if !pos(s.xt_max) {
                p.push(format!("xt_max: must be positive, got {}", s.xt_max));
            }
            if s.xt_cells < 2 {
                p.push(format!("xt_cells: must be at least 2, got {}", s.xt_cells));
            }
        }
        Mode::Kpp => {
            time(&mut p);
            if !(s.y_min < 0.0 && s.y_max > 0.0) {
                p.push(format!(
                    "y_min, y_max: the initial step sits at y = 0 and must be inside [{}, {}]",
                    s.y_min, s.y_max
                ));
            }
            if s.y_cells < 2 {
                p.push(format!("y_cells: must be at least 2, got {}", s.y_cells));
            }
            if !(s.level > 0.0 && s.level < 1.0) {
                p.push(format!("level: must lie in (0, 1), got {}", s.level));
            }
            if s.tau * s.alpha0 > 0.25 {
                p.push(format!("tau: tau * alpha0 = {} exceeds 0.25", s.tau * s.alpha0));
            }
        }
        Mode::Analytic => {
            if s.theta.is_none() {
                p.push("theta: required for the closed-form path".into());
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    p.retain(|m| seen.insert(m.clone()));
    p
}

impl RunSpec {
    pub fn grid(&self) -> UniformGrid {
        UniformGrid::new(self.x_max, self.n_cells).expect("validated grid")
    }

    pub fn learning(&self) -> kgrowth::Result<LearningFunction> {
        learning(self.alpha0, self.n)
    }

    pub fn td_config(&self) -> kgrowth::Result<TdConfig> {
        let mut c = TdConfig::new(self.grid(), self.tau, self.horizon, self.nu, self.r, self.learning()?)?;
        c.outer_tol = self.outer_tol;
        c.max_outer = self.max_outer;
        c.snapshot_every = self.snapshot_every;
        Ok(c)
    }

    /// BGP configuration with one parameter replaced (for sweeps).
    pub fn bgp_config_with(&self, key: Option<(SweepKey, f64)>) -> kgrowth::Result<BgpConfig> {
        let (mut nu, mut r, mut a0, mut n) = (self.nu, self.r, self.alpha0, self.n);
        match key {
            Some((SweepKey::Nu, v)) => nu = v,
            Some((SweepKey::R, v)) => r = v,
            Some((SweepKey::Alpha0, v)) => a0 = v,
            Some((SweepKey::N, v)) => n = v,
            None => {}
        }
        let theta = if nu == 0.0 { self.theta } else { None };
        let mut c = BgpConfig::new(self.grid(), nu, r, learning(a0, n)?, theta)?;
        if nu == 0.0 {
            c.pareto_k = self.pareto_k;
        }
        c.omega = self.omega;
        c.tol = self.tol;
        c.max_iters = self.max_iters;
        c.right_bc = self.right_bc;
        c.eps_hjb = self.eps_hjb;
        c.validate()?;
        Ok(c)
    }
}

fn learning(alpha0: f64, n: f64) -> kgrowth::Result<LearningFunction> {
    if n == 0.0 {
        LearningFunction::constant(alpha0)
    } else {
        LearningFunction::new(alpha0, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn reference_time_dependent_setup() {
        let f = file("mode = \"td\"\nalpha0 = 0.075\nn = 0.3\nr = 0.05\nnu = 0.005\n");
        let s = parse_config(Some(f.path()), &[], None, None).unwrap();
        assert_eq!(s.mode, Mode::Td);
        assert_eq!((s.alpha0, s.n, s.r, s.nu), (0.075, 0.3, 0.05, 0.005));
        assert_eq!((s.x_max, s.n_cells, s.tau, s.horizon), (20.0, 1000, 0.05, 100.0));
        let c = s.td_config().unwrap();
        assert_eq!(c.steps(), 2000);
    }

    #[test]
    fn flags_override_file() {
        let f = file("mode = \"td\"\nnu = 0.005\n");
        let s = parse_config(Some(f.path()), &ov(&[("nu", "0.125")]), None, None).unwrap();
        assert_eq!(s.nu, 0.125);
        let s = parse_config(Some(f.path()), &ov(&[("mode", "bgp")]), None, None).unwrap();
        assert_eq!(s.mode, Mode::Bgp);
        let s = parse_config(Some(f.path()), &[], Some(Mode::Kpp), None).unwrap();
        assert_eq!(s.mode, Mode::Kpp);
    }

    #[test]
    fn theta_required_without_diffusion() {
        let f = file("");
        let e = parse_config(Some(f.path()), &ov(&[("nu", "0")]), Some(Mode::Bgp), None).unwrap_err();
        match e {
            ConfigError::Invalid(p) => assert!(p.iter().any(|m| m.starts_with("theta")), "{p:?}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config(None, &ov(&[("mode", "td"), ("nuu", "0.1")]), None, None).unwrap_err();
        assert!(e.to_string().contains("nuu"), "{e}");
        let f = file("mode = \"td\"\nbogus = 1\n");
        let e = parse_config(Some(f.path()), &[], None, None).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
    }

    #[test]
    fn every_violation_is_listed() {
        let e = parse_config(
            None,
            &ov(&[
                ("mode", "td"),
                ("alpha0", "-1"),
                ("r", "0"),
                ("tau", "0.03"),
                ("n", "1.5"),
            ]),
            None,
            None,
        )
        .unwrap_err();
        match e {
            ConfigError::Invalid(p) => {
                for key in ["alpha0", "r", "horizon", "n:"] {
                    assert!(p.iter().any(|m| m.starts_with(key)), "{key} missing from {p:?}");
                }
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn overrides_take_toml_or_bare_values() {
        let s = parse_config(
            None,
            &ov(&[
                ("mode", "sweep"),
                ("sweep-values", "[0.02, 0.04]"),
                ("right_bc", "far_field"),
            ]),
            None,
            None,
        )
        .unwrap();
        assert_eq!(s.sweep_values, vec![0.02, 0.04]);
        assert_eq!(s.right_bc, RightBoundary::FarField);
        assert!(parse_config(None, &ov(&[("mode", "td"), ("nu", "fast")]), None, None).is_err());
    }

    #[test]
    fn missing_mode_is_reported() {
        assert!(matches!(
            parse_config(None, &[], None, None),
            Err(ConfigError::Invalid(_))
        ));
    }
}
