//! Named experiments driven by plain-text `key = value` configurations.
//!
//! Every experiment declares the full list of keys it reads. A configuration
//! must supply exactly those keys; the effective configuration is echoed into
//! the report, so a report alone is enough to rerun the experiment. Key names
//! carry their unit as a suffix: `_len` (space), `_time`, `_freq`
//! (frequency), `_s` (wall-clock seconds), `_count`, `_rel` and `_abs`
//! (relative and absolute tolerances).
//!
//! [`run`] computes everything in memory and returns an [`Outcome`]; nothing
//! touches the file system until [`write_outcome`] is called, so a rejected
//! configuration leaves no partial output behind.

use crate::bilinear::{separation_sweep, Profile, SweepConfig};
use crate::decay::{
    analytic_extension_probe, bootstrap_smallness, g_polynomial_scan, inequality_chain, mu_slope_fit, tail_norm_curve,
    tail_norm_h, FitWindow,
};
use crate::error::{LabError, Result};
use crate::extremizer::{eigen_residual, gauge_fix, omega_of_with, picard_iterate_with, PicardRun};
use crate::functional::{golden_power_sums, grid_evaluator, quadratic_log_fit, residual_statistic};
use crate::lattice::{forward_transform, inverse_transform, UniformGrid, WaveFunction};
use crate::multilinear::{calibrate_kappa, q_quadrature_with, q_spacetime_with, random_packet, ConstraintRule, KAPPA};
use crate::propagator::{evolve, evolve_range, fourier_symmetry_check_with, strichartz_report, TimeQuadrature};
use crate::C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SharpConstant,
    Iterate,
    BilinearSweep,
    FunctionalResidual,
    PowerSums,
    DecayReport,
    QCrosscheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::SharpConstant,
        Experiment::Iterate,
        Experiment::BilinearSweep,
        Experiment::FunctionalResidual,
        Experiment::PowerSums,
        Experiment::DecayReport,
        Experiment::QCrosscheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SharpConstant => "sharp-constant",
            Experiment::Iterate => "iterate",
            Experiment::BilinearSweep => "bilinear-sweep",
            Experiment::FunctionalResidual => "functional-residual",
            Experiment::PowerSums => "power-sums",
            Experiment::DecayReport => "decay-report",
            Experiment::QCrosscheck => "q-crosscheck",
        }
    }

    /// Acceptance criteria whose checks this experiment carries.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Experiment::SharpConstant => &[1, 9],
            Experiment::Iterate => &[3, 4],
            Experiment::BilinearSweep => &[5],
            Experiment::FunctionalResidual => &[7],
            Experiment::PowerSums => &[6],
            Experiment::DecayReport => &[8],
            Experiment::QCrosscheck => &[2],
        }
    }

    /// Criterion that carries the wall-clock limit, if any.
    pub fn runtime_criterion(self) -> Option<u8> {
        match self {
            Experiment::SharpConstant => Some(1),
            Experiment::Iterate => Some(4),
            Experiment::PowerSums => Some(6),
            _ => None,
        }
    }

    /// Every key the experiment reads, with its default value.
    pub fn schema(self) -> Vec<(&'static str, &'static str)> {
        const GRID: [(&str, &str); 3] = [("grid.n", "1024"), ("grid.half_width_len", "20"), ("seed", "0")];
        const TIME: [(&str, &str); 2] = [("time.nodes_count", "257"), ("time.scale_time", "0.25")];
        const PICARD: [(&str, &str); 3] =
            [("iterate.perturbation_per_len", "0.1"), ("iterate.tol_abs", "1e-8"), ("iterate.max_steps_count", "200")];
        let mut keys: Vec<(&str, &str)> = Vec::new();
        match self {
            Experiment::SharpConstant => {
                keys.extend(GRID);
                keys.extend(TIME);
                keys.extend([
                    ("check.ratio_tol_abs", "1e-3"),
                    ("check.roundtrip_tol_rel", "1e-12"),
                    ("check.plancherel_tol_rel", "1e-10"),
                    ("check.unitarity_tol_rel", "1e-12"),
                    ("check.unitarity_times_time", "0.05,0.5,5"),
                    ("check.runtime_limit_s", "10"),
                ]);
            }
            Experiment::Iterate => {
                keys.extend(GRID);
                keys.extend(TIME);
                keys.extend(PICARD);
                keys.extend([
                    ("fit.floor_rel", "1e-10"),
                    ("check.eigen_tol_rel", "1e-3"),
                    ("check.omega_tol_abs", "0.5"),
                    ("check.ratio_tol_abs", "1e-3"),
                    ("check.fit_residual_max", "1e-3"),
                    ("check.runtime_limit_s", "300"),
                ]);
            }
            Experiment::BilinearSweep => {
                keys.extend([
                    ("seed", "0"),
                    ("sweep.s_freq", "1"),
                    ("sweep.n_list", "4,8,16,32,64"),
                    ("sweep.profile", "flat"),
                    ("sweep.window_len", "200"),
                    ("sweep.nyquist_factor", "2"),
                    ("sweep.time_nodes_count", "257"),
                    ("sweep.time_scale_rel", "0.5"),
                    ("check.slope_margin_abs", "0.05"),
                    ("check.bound_tol_rel", "0"),
                ]);
            }
            Experiment::FunctionalResidual => {
                keys.extend(GRID);
                keys.extend(TIME);
                keys.extend(PICARD);
                keys.extend([
                    ("functional.samples_count", "10000"),
                    ("functional.box_lo_len", "-3"),
                    ("functional.box_hi_len", "3"),
                    ("check.gaussian_sup_max", "1e-10"),
                    ("check.sech_sup_min", "0.05"),
                    ("check.iterate_sup_max", "1e-2"),
                ]);
            }
            Experiment::PowerSums => {
                keys.extend([("seed", "0"), ("power.kmax_count", "200"), ("check.runtime_limit_s", "1")]);
            }
            Experiment::DecayReport => {
                keys.extend(GRID);
                keys.extend(TIME);
                keys.extend([
                    ("decay.s_freq", "2"),
                    ("decay.s_list_freq", "2,2.5,3"),
                    ("decay.eps_list", "1e-9,1e-8,1e-7,1e-6,1e-5,1e-4,1e-3,1e-2,1e-1,1"),
                    ("decay.c_list", "0.5,1,2,4"),
                    ("decay.chain_s_freq", "1.5"),
                    ("decay.chain_eps", "1"),
                    ("decay.window_hi_rel", "1e-2"),
                    ("decay.window_lo_rel", "1e-12"),
                    ("decay.probe_count", "20"),
                    ("check.mu_tol_abs", "1e-3"),
                    ("check.h_limit_tol_rel", "1e-6"),
                    ("check.probe_value_tol_abs", "1e-8"),
                    ("check.cr_residual_max", "1e-6"),
                    ("check.chain_tol_rel", "1e-3"),
                ]);
            }
            Experiment::QCrosscheck => {
                keys.extend(GRID);
                keys.extend(TIME);
                keys.extend([
                    ("q.outer_points_count", "40"),
                    ("q.angular_min_count", "16"),
                    ("q.angular_density", "1.5"),
                    ("q.support_rel", "1e-8"),
                    ("q.random_count", "10"),
                    ("check.gaussian_tol_rel", "1e-2"),
                    ("check.random_tol_rel", "2e-2"),
                    ("check.kappa_spread_max", "1e-3"),
                ]);
            }
        }
        keys
    }

    pub fn default_config(self) -> Config {
        let mut config = Config::default();
        for (k, v) in self.schema() {
            config.set(k, v);
        }
        config
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Usage(format!("unknown experiment '{s}'")))
    }
}

/// Ordered `key = value` pairs. Lines starting with `#` are comments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("line {}: expected 'key = value', got '{line}'", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(LabError::Usage(format!("line {}: empty key or value", no + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(LabError::Usage(format!("line {}: duplicate key '{k}'", no + 1)));
            }
        }
        Ok(Config { entries })
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().fold(String::new(), |mut out, (k, v)| {
            let _ = writeln!(out, "{k} = {v}");
            out
        })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.entries.get(key).map(String::as_str).ok_or_else(|| LabError::Usage(format!("missing key '{key}'")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| LabError::Usage(format!("cannot parse '{raw}' for key '{key}'")))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.raw(key)?
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|_| LabError::Usage(format!("cannot parse '{item}' in list '{key}'")))
            })
            .collect()
    }

    /// The key set must equal the experiment's schema.
    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        let schema = experiment.schema();
        if let Some((k, _)) = schema.iter().find(|(k, _)| !self.entries.contains_key(*k)) {
            return Err(LabError::Usage(format!("{}: missing key '{k}'", experiment.name())));
        }
        if let Some(k) = self.entries.keys().find(|k| !schema.iter().any(|(s, _)| s == k)) {
            return Err(LabError::Usage(format!("{}: unknown key '{k}'", experiment.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="`, `">="` or `"=="`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    fn at_most(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Check { criterion, name: name.into(), value, threshold, relation: "<=".into(), passed: value <= threshold }
    }

    fn at_least(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Check { criterion, name: name.into(), value, threshold, relation: ">=".into(), passed: value >= threshold }
    }

    fn holds(criterion: u8, name: &str, ok: bool) -> Self {
        let value = if ok { 1.0 } else { 0.0 };
        Check { criterion, name: name.into(), value, threshold: 1.0, relation: "==".into(), passed: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_s: f64,
    pub limit_s: Option<f64>,
    /// Criterion the limit belongs to.
    pub criterion: Option<u8>,
    pub within_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub timing: Timing,
}

impl ExperimentReport {
    /// The report without `timing`; identical across reruns of one config.
    pub fn body_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut value {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// A report with the data files produced alongside it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ExperimentReport,
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
}

/// Writes `report.json` and the data files into `dir`, creating it.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json())?;
    for (name, contents) in &outcome.files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

struct Collected {
    results: Value,
    checks: Vec<Check>,
    warnings: Vec<String>,
    files: Vec<(String, String)>,
}

/// Validates `config` against the schema of `experiment` and runs it.
pub fn run(experiment: Experiment, config: &Config) -> Result<Outcome> {
    config.validate(experiment)?;
    let start = Instant::now();
    let collected = match experiment {
        Experiment::SharpConstant => sharp_constant(config)?,
        Experiment::Iterate => iterate(config)?,
        Experiment::BilinearSweep => bilinear(config)?,
        Experiment::FunctionalResidual => functional(config)?,
        Experiment::PowerSums => power_sums(config)?,
        Experiment::DecayReport => decay_report(config)?,
        Experiment::QCrosscheck => q_crosscheck(config)?,
    };
    let wall_clock_s = start.elapsed().as_secs_f64();
    let limit_s: Option<f64> = match experiment.runtime_criterion() {
        Some(_) => Some(config.get("check.runtime_limit_s")?),
        None => None,
    };
    let within_limit = limit_s.is_none_or(|l| wall_clock_s < l);
    let timing = Timing {
        wall_clock_s,
        limit_s,
        criterion: experiment.runtime_criterion(),
        within_limit,
    };
    let passed = within_limit && collected.checks.iter().all(|c| c.passed);
    let report = ExperimentReport {
        experiment,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.entries.clone(),
        results: collected.results,
        checks: collected.checks,
        warnings: collected.warnings,
        passed,
        timing,
    };
    Ok(Outcome { report, files: collected.files })
}

fn positive(config: &Config, key: &str) -> Result<f64> {
    let v: f64 = config.get(key)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(LabError::Usage(format!("key '{key}' must be positive, got {v}")));
    }
    Ok(v)
}

fn tolerance(config: &Config, key: &str) -> Result<f64> {
    let v: f64 = config.get(key)?;
    if !(v >= 0.0) || !v.is_finite() {
        return Err(LabError::Usage(format!("key '{key}' must be a nonnegative tolerance, got {v}")));
    }
    Ok(v)
}

fn grid_of(config: &Config) -> Result<UniformGrid> {
    let n: usize = config.get("grid.n")?;
    let half = positive(config, "grid.half_width_len")?;
    UniformGrid::symmetric(n, half).map_err(|e| LabError::Usage(format!("grid: {e}")))
}

fn time_of(config: &Config) -> Result<TimeQuadrature> {
    let nodes: usize = config.get("time.nodes_count")?;
    let scale = positive(config, "time.scale_time")?;
    TimeQuadrature::compactified(nodes, scale).map_err(|e| LabError::Usage(format!("time rule: {e}")))
}

fn gaussian(grid: UniformGrid) -> Result<WaveFunction> {
    WaveFunction::from_real_fn(grid, |x| (-x * x).exp())
}

/// `12^(-1/12)`, the Strichartz ratio of every Gaussian.
pub fn sharp_ratio() -> f64 {
    12f64.powf(-1.0 / 12.0)
}

/// `(2 pi)^4 / (2 sqrt 3)`, the eigenvalue of the normalized Gaussian.
pub fn gaussian_omega() -> f64 {
    KAPPA / (2.0 * 3f64.sqrt())
}

fn sharp_constant(config: &Config) -> Result<Collected> {
    let grid = grid_of(config)?;
    let tq = time_of(config)?;
    let seed: u64 = config.get("seed")?;
    let ratio_tol = tolerance(config, "check.ratio_tol_abs")?;
    let roundtrip_tol = tolerance(config, "check.roundtrip_tol_rel")?;
    let plancherel_tol = tolerance(config, "check.plancherel_tol_rel")?;
    let unitarity_tol = tolerance(config, "check.unitarity_tol_rel")?;
    let times: Vec<f64> = config.list("check.unitarity_times_time")?;
    tolerance(config, "check.runtime_limit_s")?;

    let g = gaussian(grid)?;
    let report = strichartz_report(&g, &tq)?;
    let expected = sharp_ratio();
    let symmetry = fourier_symmetry_check_with(&g, &tq)?;

    let packet = random_packet(grid, seed)?;
    let mut roundtrip: f64 = 0.0;
    let mut plancherel: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    for f in [&g, &packet] {
        let spec = forward_transform(f);
        roundtrip = roundtrip.max(inverse_transform(&spec).relative_distance(f)?);
        let constant = (spec.l2_norm() / f.l2_norm()).powi(2);
        plancherel = plancherel.max((constant - 2.0 * PI).abs() / (2.0 * PI));
        for t in &times {
            let evolved = evolve(f, *t).value;
            unitarity = unitarity.max((evolved.l2_norm() - f.l2_norm()).abs() / f.l2_norm());
        }
    }

    let field = evolve_range(&g, &tq).value;
    let mut profile = String::from("t,weight,row_l6_pow6\n");
    for (k, (t, w)) in tq.nodes().iter().zip(tq.weights()).enumerate() {
        let h = field.row_spacing(k);
        let row: f64 = field.rows()[k].iter().map(|v| v.norm_sqr().powi(3)).sum::<f64>() * h;
        let _ = writeln!(profile, "{t:.15e},{w:.15e},{row:.15e}");
    }

    let checks = vec![
        Check::at_most(1, "ratio_error", (report.ratio - expected).abs(), ratio_tol),
        Check::at_most(9, "fourier_roundtrip", roundtrip, roundtrip_tol),
        Check::at_most(9, "plancherel_constant", plancherel, plancherel_tol),
        Check::at_most(9, "evolve_unitarity", unitarity, unitarity_tol),
    ];
    let warnings = report.warnings.clone();
    Ok(Collected {
        results: json!({
            "ratio": report.ratio,
            "expected_ratio": expected,
            "ratio_report": report,
            "fourier_symmetry": symmetry,
            "fourier_roundtrip_rel": roundtrip,
            "plancherel_rel": plancherel,
            "unitarity_rel": unitarity,
        }),
        checks,
        warnings,
        files: vec![("time_profile.csv".into(), profile)],
    })
}

fn picard_from_config(config: &Config, grid: UniformGrid, tq: &TimeQuadrature) -> Result<PicardRun> {
    let eps: f64 = config.get("iterate.perturbation_per_len")?;
    let tol = positive(config, "iterate.tol_abs")?;
    let steps: usize = config.get("iterate.max_steps_count")?;
    let f0 = WaveFunction::from_real_fn(grid, |x| (-x * x).exp() * (1.0 + eps * x))?;
    picard_iterate_with(&f0, tol, steps, tq)
}

fn iterate(config: &Config) -> Result<Collected> {
    let grid = grid_of(config)?;
    let tq = time_of(config)?;
    let floor = positive(config, "fit.floor_rel")?;
    let eigen_tol = tolerance(config, "check.eigen_tol_rel")?;
    let omega_tol = tolerance(config, "check.omega_tol_abs")?;
    let ratio_tol = tolerance(config, "check.ratio_tol_abs")?;
    let fit_max = tolerance(config, "check.fit_residual_max")?;
    tolerance(config, "check.runtime_limit_s")?;

    let g0 = gauge_fix(&gaussian(grid)?)?;
    let eigen = eigen_residual(&g0, &tq)?;
    let run = picard_from_config(config, grid, &tq)?;
    let last = run.last();
    let fit = quadratic_log_fit(&last.f, floor)?;
    let decay = mu_slope_fit(&last.f, FitWindow::default()).ok();
    let last_delta = if last.step_index > 0 { last.delta } else { f64::INFINITY };

    let checks = vec![
        Check::at_most(3, "eigen_residual", eigen.residual, eigen_tol),
        Check::at_most(3, "omega_error", (eigen.omega - gaussian_omega()).abs(), omega_tol),
        Check::holds(4, "picard_converged", run.converged),
        Check::at_most(4, "final_delta", last_delta, run.tol),
        Check::at_most(4, "final_ratio_error", (last.ratio - sharp_ratio()).abs(), ratio_tol),
        Check::at_most(4, "log_fit_residual", fit.residual, fit_max),
        Check::holds(4, "log_fit_re_a_negative", fit.a.re < 0.0),
    ];
    Ok(Collected {
        results: json!({
            "eigen": eigen,
            "expected_omega": gaussian_omega(),
            "converged": run.converged,
            "steps": last.step_index,
            "final_delta": last.delta,
            "final_ratio": last.ratio,
            "final_omega": last.omega_estimate,
            "ratio_decreases": run.ratio_decreases(),
            "log_fit": fit,
            "mu_fit": decay,
        }),
        checks,
        warnings: run.warnings.iter().map(|w| w.to_string()).collect(),
        files: vec![("trajectory.csv".into(), run.trajectory_csv()), ("extremizer.csv".into(), last.f.to_csv())],
    })
}

fn bilinear(config: &Config) -> Result<Collected> {
    let seed: u64 = config.get("seed")?;
    let s = positive(config, "sweep.s_freq")?;
    let ns: Vec<f64> = config.list("sweep.n_list")?;
    let profile: Profile = config.get("sweep.profile")?;
    let sweep = SweepConfig {
        window_length: positive(config, "sweep.window_len")?,
        nyquist_factor: positive(config, "sweep.nyquist_factor")?,
        time_nodes: config.get("sweep.time_nodes_count")?,
        time_scale: positive(config, "sweep.time_scale_rel")?,
    };
    let margin = tolerance(config, "check.slope_margin_abs")?;
    let bound_tol = tolerance(config, "check.bound_tol_rel")?;
    if ns.is_empty() || ns.iter().any(|n| !(*n >= 1.0)) {
        return Err(LabError::Usage("sweep.n_list needs separation factors N >= 1".into()));
    }

    let report = separation_sweep(s, &ns, profile, seed, &sweep)?;
    let checks = vec![
        Check::at_most(5, "loglog_slope", report.slope, -1.0 / 6.0 + margin),
        Check::holds(5, "hausdorff_young_bound_every_pair", report.bound_holds(bound_tol)),
    ];
    Ok(Collected {
        results: serde_json::to_value(&report).expect("sweep serializes"),
        checks,
        warnings: Vec::new(),
        files: vec![("sweep.csv".into(), report.to_csv()), ("loglog.dat".into(), report.loglog_data())],
    })
}

fn functional(config: &Config) -> Result<Collected> {
    let grid = grid_of(config)?;
    let tq = time_of(config)?;
    let seed: u64 = config.get("seed")?;
    let samples: usize = config.get("functional.samples_count")?;
    let lo: f64 = config.get("functional.box_lo_len")?;
    let hi: f64 = config.get("functional.box_hi_len")?;
    let gaussian_max = tolerance(config, "check.gaussian_sup_max")?;
    let sech_min = tolerance(config, "check.sech_sup_min")?;
    let iterate_max = tolerance(config, "check.iterate_sup_max")?;
    if !(hi > lo) || samples == 0 {
        return Err(LabError::Usage("functional sampler needs box_lo_len < box_hi_len and samples".into()));
    }

    let gauss = residual_statistic(|x: f64| C64::new((-x * x).exp(), 0.0), samples, seed, (lo, hi))?;
    let sech = residual_statistic(|x: f64| C64::new(1.0 / x.cosh(), 0.0), samples, seed, (lo, hi))?;
    let run = picard_from_config(config, grid, &tq)?;
    let iterate = residual_statistic(grid_evaluator(&run.last().f), samples, seed, (lo, hi))?;

    let mut table = String::from("function,sup,rms,samples\n");
    for (name, r) in [("gaussian", &gauss), ("sech", &sech), ("picard_iterate", &iterate)] {
        let _ = writeln!(table, "{name},{:.6e},{:.6e},{}", r.sup, r.rms, r.samples);
    }
    let checks = vec![
        Check::at_most(7, "gaussian_sup_residual", gauss.sup, gaussian_max),
        Check::at_least(7, "sech_sup_residual", sech.sup, sech_min),
        Check::holds(7, "picard_converged", run.converged),
        Check::at_most(7, "iterate_sup_residual", iterate.sup, iterate_max),
    ];
    Ok(Collected {
        results: json!({ "gaussian": gauss, "sech": sech, "picard_iterate": iterate, "picard_steps": run.last().step_index }),
        checks,
        warnings: run.warnings.iter().map(|w| w.to_string()).collect(),
        files: vec![("residuals.csv".into(), table)],
    })
}

fn power_sums(config: &Config) -> Result<Collected> {
    let kmax: u32 = config.get("power.kmax_count")?;
    tolerance(config, "check.runtime_limit_s")?;
    let table = golden_power_sums(kmax).map_err(|e| LabError::Usage(e.to_string()))?;
    let checks = vec![
        Check::holds(6, "all_p_k_nonzero", table.all_nonzero),
        Check::holds(6, "all_bounds_hold", table.all_bounds_hold),
    ];
    let first_failure = table.rows.iter().find(|r| r.p.is_zero() || !r.bound_holds).map(|r| r.k);
    Ok(Collected {
        results: json!({
            "kmax": kmax,
            "rows": table.rows.len(),
            "all_nonzero": table.all_nonzero,
            "all_bounds_hold": table.all_bounds_hold,
            "first_failure_k": first_failure,
        }),
        checks,
        warnings: Vec::new(),
        files: vec![("power_sums.txt".into(), table.to_text())],
    })
}

fn decay_report(config: &Config) -> Result<Collected> {
    let grid = grid_of(config)?;
    let tq = time_of(config)?;
    let s = positive(config, "decay.s_freq")?;
    let s_list: Vec<f64> = config.list("decay.s_list_freq")?;
    let eps_list: Vec<f64> = config.list("decay.eps_list")?;
    let c_list: Vec<f64> = config.list("decay.c_list")?;
    let chain_s = positive(config, "decay.chain_s_freq")?;
    let chain_eps = tolerance(config, "decay.chain_eps")?;
    let window = FitWindow { rel_hi: positive(config, "decay.window_hi_rel")?, rel_lo: positive(config, "decay.window_lo_rel")? };
    let probes: usize = config.get("decay.probe_count")?;
    let mu_tol = tolerance(config, "check.mu_tol_abs")?;
    let h_tol = tolerance(config, "check.h_limit_tol_rel")?;
    let value_tol = tolerance(config, "check.probe_value_tol_abs")?;
    let cr_max = tolerance(config, "check.cr_residual_max")?;
    let chain_tol = tolerance(config, "check.chain_tol_rel")?;

    let g = gaussian(grid)?.normalized()?;
    let fit = mu_slope_fit(&g, window)?;
    let h_values = tail_norm_curve(&g, s, &eps_list)?;
    let h_limit = tail_norm_h(&g, s, 0.0)?;
    let smallest = eps_list
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| LabError::Usage("decay.eps_list is empty".into()))?;
    let mut order: Vec<usize> = (0..eps_list.len()).collect();
    order.sort_by(|a, b| eps_list[*a].total_cmp(&eps_list[*b]));
    let monotone = order.windows(2).all(|p| h_values[p[1]] <= h_values[p[0]]);
    let limit_gap = (h_values[smallest] - h_limit).abs() / h_limit;

    let smallness: Vec<_> = s_list.iter().map(|s| bootstrap_smallness(&g, *s)).collect::<Result<_>>()?;
    let o1_decreasing = smallness.windows(2).all(|p| p[1].o1 < p[0].o1);
    let o2_decreasing = smallness.windows(2).all(|p| p[1].o2 < p[0].o2);

    let omega = omega_of_with(&g, &tq)?;
    let scans: Vec<_> = c_list.iter().map(|c| g_polynomial_scan(omega, *c)).collect::<Result<_>>()?;
    let scans_ok = scans.iter().all(|sc| sc.x0 > 0.0 && sc.x0 < sc.x1 && sc.concave);

    let mut zs: Vec<C64> = (0..probes)
        .map(|k| {
            let u = k as f64 / probes.max(2).saturating_sub(1) as f64;
            C64::new(-1.0 + 2.0 * u, -0.5 + u)
        })
        .collect();
    zs.push(C64::i());
    let probe = analytic_extension_probe(&g, &zs, window)?;
    let scale = g.values()[grid.n() / 2].re;
    let at_i = probe.points.last().expect("probe at i").value / scale;
    let probe_error = (at_i - C64::new(1f64.exp(), 0.0)).norm();

    let chain = inequality_chain(&g, chain_s, chain_eps, omega, &ConstraintRule::default())?;

    let mut h_csv = String::from("eps,H\n");
    for (e, h) in eps_list.iter().zip(&h_values) {
        let _ = writeln!(h_csv, "{e:e},{h:.15e}");
    }
    let _ = writeln!(h_csv, "0,{h_limit:.15e}");
    let mut small_csv = String::from("s,mu,f_sim_norm,o1,o2\n");
    for sm in &smallness {
        let _ = writeln!(small_csv, "{},{:.15e},{:.15e},{:.15e},{:.15e}", sm.s, sm.mu, sm.f_sim_norm, sm.o1, sm.o2);
    }
    let mut g_csv = String::from("omega,C,M,argmax,x0,x1,concave\n");
    for sc in &scans {
        let _ = writeln!(g_csv, "{:.15e},{},{:.15e},{:.15e},{:.15e},{:.15e},{}", sc.omega, sc.c, sc.m, sc.argmax, sc.x0, sc.x1, sc.concave);
    }

    let checks = vec![
        Check::at_most(8, "mu_hat_error", (fit.mu_hat - 0.25).abs(), mu_tol),
        Check::holds(8, "h_nonincreasing", monotone),
        Check::at_most(8, "h_limit_gap", limit_gap, h_tol),
        Check::holds(8, "o1_strictly_decreasing", o1_decreasing),
        Check::at_most(8, "probe_value_error_at_i", probe_error, value_tol),
        Check::at_most(8, "cauchy_riemann_residual", probe.max_cr_residual, cr_max),
        Check::holds(8, "g_scan_two_roots_concave", scans_ok),
        Check::holds(8, "inequality_chain", chain.holds(chain_tol)),
    ];
    Ok(Collected {
        results: json!({
            "mu_fit": fit,
            "s": s,
            "mu": s.powi(-4),
            "h_values": h_values,
            "h_limit": h_limit,
            "smallness": smallness,
            "o2_decreasing": o2_decreasing,
            "omega": omega,
            "g_scans": scans,
            "probe": probe,
            "chain": chain,
        }),
        checks,
        warnings: Vec::new(),
        files: vec![
            ("h_curve.csv".into(), h_csv),
            ("smallness.csv".into(), small_csv),
            ("g_scan.csv".into(), g_csv),
        ],
    })
}

fn packet(grid: UniformGrid, width: f64, centre: f64, modulation: f64) -> Result<WaveFunction> {
    WaveFunction::from_fn(grid, |x| {
        let y = x - centre;
        C64::from_polar((-y * y / (width * width)).exp(), modulation * x)
    })
}

fn sextuple(fs: &[WaveFunction]) -> [&WaveFunction; 6] {
    std::array::from_fn(|i| &fs[i])
}

fn q_crosscheck(config: &Config) -> Result<Collected> {
    let grid = grid_of(config)?;
    let tq = time_of(config)?;
    let seed: u64 = config.get("seed")?;
    let rule = ConstraintRule {
        outer_points: config.get("q.outer_points_count")?,
        angular_min: config.get("q.angular_min_count")?,
        angular_density: positive(config, "q.angular_density")?,
        support_rel: positive(config, "q.support_rel")?,
    };
    let random_count: usize = config.get("q.random_count")?;
    let gaussian_tol = tolerance(config, "check.gaussian_tol_rel")?;
    let random_tol = tolerance(config, "check.random_tol_rel")?;
    let spread_max = tolerance(config, "check.kappa_spread_max")?;

    let specs: [[(f64, f64, f64); 6]; 3] = [
        [(1.0, 0.0, 0.0); 6],
        [(1.0, 0.0, 0.0), (0.9, 0.3, 0.0), (1.2, 0.0, 0.5), (1.0, 0.0, 0.5), (1.1, -0.2, 0.0), (0.8, 0.0, 0.0)],
        [(0.8, 0.0, 1.0), (1.0, 0.0, -1.0), (1.0, 0.5, 0.0), (1.3, 0.0, 0.0), (0.9, 0.0, 0.0), (1.0, -0.5, 0.5)],
    ];
    let gaussians: Vec<Vec<WaveFunction>> = specs
        .iter()
        .map(|row| row.iter().map(|(w, c, m)| packet(grid, *w, *c, *m)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let randoms: Vec<Vec<WaveFunction>> = (0..random_count as u64)
        .map(|k| (0..6).map(|j| random_packet(grid, seed.wrapping_mul(1000).wrapping_add(6 * k + j))).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    let inputs: Vec<[&WaveFunction; 6]> = gaussians.iter().map(|fs| sextuple(fs)).collect();
    let calibration = calibrate_kappa(&inputs, &tq, &rule)?;

    let mut rows = String::from("family,index,q_spacetime_re,q_spacetime_im,q_quadrature_re,q_quadrature_im,rel_diff\n");
    let mut warnings = Vec::new();
    let mut compare = |family: &str, sets: &[Vec<WaveFunction>]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, fs) in sets.iter().enumerate() {
            let st = q_spacetime_with(sextuple(fs), &tq)?;
            warnings.extend(st.warnings.iter().map(|w| format!("{family} {i}: {w}")));
            let q = q_quadrature_with(sextuple(fs), &rule)?.value;
            let rel = (st.value - q).norm() / st.value.norm();
            worst = worst.max(rel);
            let _ = writeln!(rows, "{family},{i},{:.15e},{:.15e},{:.15e},{:.15e},{rel:.6e}", st.value.re, st.value.im, q.re, q.im);
        }
        Ok(worst)
    };
    let gaussian_worst = compare("gaussian", &gaussians)?;
    let random_worst = compare("random", &randoms)?;

    let checks = vec![
        Check::at_most(2, "kappa_spread", calibration.spread, spread_max),
        Check::at_most(2, "gaussian_rel_diff", gaussian_worst, gaussian_tol),
        Check::at_most(2, "random_rel_diff", random_worst, random_tol),
    ];
    Ok(Collected {
        results: json!({
            "kappa_analytic": KAPPA,
            "calibration": calibration,
            "gaussian_worst_rel": gaussian_worst,
            "random_worst_rel": random_worst,
            "rule": rule,
        }),
        checks,
        warnings,
        files: vec![("q_values.csv".into(), rows)],
    })
}
