//! Experiment configuration and the three CSV-producing commands.

use anyhow::{bail, ensure, Context, Result};
use irs_maxmin::driver::{
    compare_schemes, run, AlgorithmOptions, CompareOptions, InitReflect, IterationRecord, RunTrace, Variant,
};
use irs_maxmin::linalg::linear_to_db;
use irs_maxmin::model::SystemConfig;
use irs_maxmin::scenario::{dbm_to_watts, paper_default_scenario, Geometry, PathLossModel, ScenarioSpec};
use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};

/// `[scenario]`: every field overrides the built-in default layout.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub bs_antennas: Option<usize>,
    pub reflectors: Option<usize>,
    pub noise_dbm: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub geometry: Option<Geometry>,
    pub path_loss: Option<PathLossModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitChoice {
    Random,
    Zero,
}

/// `[algorithm]`
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmSection {
    /// `sca`, `sdr`, `random-phase`, `no-irs` or `all`.
    pub variant: String,
    pub epsilon: f64,
    pub max_iters: usize,
    pub init: InitChoice,
    pub bisection_tol: f64,
    pub randomization_count: usize,
    pub solver_tol: f64,
}

impl Default for AlgorithmSection {
    fn default() -> Self {
        let d = AlgorithmOptions::default();
        Self {
            variant: "all".into(),
            epsilon: d.epsilon,
            max_iters: d.max_iters,
            init: InitChoice::Random,
            bisection_tol: d.bisection_tol,
            randomization_count: d.randomization_count,
            solver_tol: d.solver_tol,
        }
    }
}

/// `[experiment]`
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trials: usize,
    /// Sweep powers in dBm, strictly increasing.
    pub p_max_dbm: Vec<f64>,
    /// Power of the convergence experiment.
    pub convergence_p_max_dbm: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("results"),
            seed: 0,
            trials: 100,
            p_max_dbm: vec![15.0, 20.0, 25.0, 30.0, 35.0],
            convergence_p_max_dbm: 35.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    pub algorithm: AlgorithmSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Convergence,
    PowerSweep,
    RandomUsersSweep,
}

impl ExperimentKind {
    pub fn file_name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence.csv",
            ExperimentKind::PowerSweep => "power_sweep.csv",
            ExperimentKind::RandomUsersSweep => "random_users.csv",
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("invalid experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.experiment.p_max_dbm;
        ensure!(!p.is_empty(), "p_max_dbm must list at least one power");
        ensure!(p.iter().all(|x| x.is_finite()), "p_max_dbm entries must be finite");
        ensure!(p.windows(2).all(|w| w[0] < w[1]), "p_max_dbm must be strictly increasing, got {p:?}");
        ensure!(self.experiment.trials >= 1, "trials must be at least 1");
        self.variants()?;
        self.algorithm_options(Variant::Sca).validate()?;
        self.scenario_spec(self.experiment.convergence_p_max_dbm)?;
        Ok(())
    }

    pub fn variants(&self) -> Result<Vec<Variant>> {
        match self.algorithm.variant.as_str() {
            "all" => Ok(Variant::ALL.to_vec()),
            other => Ok(vec![other.parse::<Variant>()?]),
        }
    }

    pub fn algorithm_options(&self, variant: Variant) -> AlgorithmOptions {
        let a = &self.algorithm;
        AlgorithmOptions {
            variant,
            epsilon: a.epsilon,
            max_iters: a.max_iters,
            init_v: match a.init {
                InitChoice::Random => InitReflect::RandomUnitPhase(self.experiment.seed),
                InitChoice::Zero => InitReflect::Zero,
            },
            bisection_tol: a.bisection_tol,
            randomization_count: a.randomization_count,
            solver_tol: a.solver_tol,
        }
    }

    pub fn scenario_spec(&self, p_max_dbm: f64) -> Result<ScenarioSpec> {
        let s = &self.scenario;
        let mut spec = paper_default_scenario(p_max_dbm, self.experiment.seed);
        if let Some(g) = &s.geometry {
            spec.geometry = g.clone();
        }
        if let Some(pl) = s.path_loss {
            spec.path_loss = pl;
        }
        let k = spec.geometry.bs_positions.len();
        let base = &spec.config;
        let weights = s.weights.clone().unwrap_or_else(|| vec![1.0; k]);
        let noise = s.noise_dbm.map(dbm_to_watts).unwrap_or(base.noise_power()[0]);
        spec.config = SystemConfig::new(
            k,
            s.bs_antennas.unwrap_or(base.m()),
            s.reflectors.unwrap_or(base.n()),
            vec![dbm_to_watts(p_max_dbm); k],
            weights,
            vec![noise; k],
        )?;
        spec.validate()?;
        Ok(spec)
    }
}

/// One row per iteration; cells of a variant that stopped earlier are left empty.
pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let spec = cfg.scenario_spec(cfg.experiment.convergence_p_max_dbm)?;
    let wanted = cfg.variants()?;
    let trace_for = |v: Variant| -> Result<Option<RunTrace>> {
        if !wanted.contains(&v) {
            return Ok(None);
        }
        let trace = run(&spec, &cfg.algorithm_options(v)).with_context(|| format!("{v} run failed"))?;
        Ok(Some(trace))
    };
    let sca = trace_for(Variant::Sca)?;
    let sdr = trace_for(Variant::Sdr)?;
    let rows = [&sca, &sdr].iter().filter_map(|t| t.as_ref().map(|t| t.records.len())).max().unwrap_or(0);
    let cell = |t: &Option<RunTrace>, l: usize, f: &dyn Fn(&IterationRecord) -> f64| {
        t.as_ref().and_then(|t| t.records.get(l)).map(|r| f(r).to_string()).unwrap_or_default()
    };
    let path = output_path(cfg, ExperimentKind::Convergence)?;
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["iteration", "min_sinr_db_sca", "min_sinr_db_sdr", "elapsed_s_sca", "elapsed_s_sdr"])?;
    for l in 0..rows {
        let db = |r: &IterationRecord| linear_to_db(r.after_v);
        let secs = |r: &IterationRecord| r.elapsed.as_secs_f64();
        w.write_record([
            (l + 1).to_string(),
            cell(&sca, l, &db),
            cell(&sdr, l, &db),
            cell(&sca, l, &secs),
            cell(&sdr, l, &secs),
        ])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn cmd_power_sweep(cfg: &ExperimentConfig) -> Result<PathBuf> {
    sweep(cfg, ExperimentKind::PowerSweep, false)
}

pub fn cmd_random_users_sweep(cfg: &ExperimentConfig) -> Result<PathBuf> {
    sweep(cfg, ExperimentKind::RandomUsersSweep, true)
}

fn sweep(cfg: &ExperimentConfig, kind: ExperimentKind, random_users: bool) -> Result<PathBuf> {
    let p = &cfg.experiment.p_max_dbm;
    let spec = cfg.scenario_spec(p[0])?;
    let opts = CompareOptions {
        algorithm: cfg.algorithm_options(Variant::Sca),
        schemes: cfg.variants()?,
        random_users,
    };
    let rows = compare_schemes(&spec, p, cfg.experiment.trials, cfg.experiment.seed, &opts)?;
    let path = output_path(cfg, kind)?;
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["p_max_dbm", "scheme", "mean_min_sinr_db", "trial_count"])?;
    for row in &rows {
        if row.failed > 0 {
            eprintln!("warning: {} at {} dBm: {} trial(s) failed", row.scheme, row.p_max_dbm, row.failed);
        }
        if row.trial_count == 0 {
            bail!("every {} trial at {} dBm failed", row.scheme, row.p_max_dbm);
        }
        w.write_record([
            row.p_max_dbm.to_string(),
            row.scheme.to_string(),
            row.mean_min_sinr_db.to_string(),
            row.trial_count.to_string(),
        ])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn run_experiment(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<PathBuf> {
    match kind {
        ExperimentKind::Convergence => cmd_convergence(cfg),
        ExperimentKind::PowerSweep => cmd_power_sweep(cfg),
        ExperimentKind::RandomUsersSweep => cmd_random_users_sweep(cfg),
    }
}

fn output_path(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<PathBuf> {
    let dir = &cfg.experiment.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir.join(kind.file_name()))
}
