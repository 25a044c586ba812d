//! Alternating optimization of transmit and reflect beamforming, the two
//! benchmark schemes, and multi-trial scheme comparison.

use crate::error::{Error, Result};
use crate::linalg::linear_to_db;
use crate::model::{quadratic_data, ChannelSet, ReflectVector, SystemConfig, TransmitBeamformers};
use crate::rbf_sca::sca_update;
use crate::rbf_sdr::{sdr_update, SdrOptions};
use crate::scenario::{generate_channels, with_random_users, ScenarioSpec};
use crate::txbf::{solve_p2_from, TxbfOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Sca,
    Sdr,
    RandomPhase,
    NoIrs,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Sca, Variant::Sdr, Variant::RandomPhase, Variant::NoIrs];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Sca => "sca",
            Variant::Sdr => "sdr",
            Variant::RandomPhase => "random-phase",
            Variant::NoIrs => "no-irs",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitReflect {
    Zero,
    RandomUnitPhase(u64),
}

#[derive(Debug, Clone)]
pub struct AlgorithmOptions {
    pub variant: Variant,
    /// Stop when the min weighted SINR (linear) after the reflect step rises by less than this.
    pub epsilon: f64,
    pub max_iters: usize,
    pub init_v: InitReflect,
    pub bisection_tol: f64,
    pub randomization_count: usize,
    pub solver_tol: f64,
}

impl Default for AlgorithmOptions {
    fn default() -> Self {
        Self {
            variant: Variant::Sca,
            epsilon: 1e-3,
            max_iters: 30,
            init_v: InitReflect::RandomUnitPhase(0),
            bisection_tol: 1e-4,
            randomization_count: 200,
            solver_tol: crate::conic::DEFAULT_TOL,
        }
    }
}

impl AlgorithmOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.bisection_tol > 0.0 && self.solver_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.randomization_count == 0 {
            return Err(Error::InvalidArgument("randomization_count must be at least 1".into()));
        }
        Ok(())
    }

    fn txbf(&self) -> TxbfOptions {
        TxbfOptions {
            rel_tol: self.bisection_tol,
            solver_tol: self.solver_tol,
            ..Default::default()
        }
    }

    fn init_seed(&self) -> u64 {
        match self.init_v {
            InitReflect::Zero => 0,
            InitReflect::RandomUnitPhase(seed) => seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    pub after_w: f64,
    pub after_v: f64,
    /// SDR only: the relaxation value of this iteration.
    pub t_relaxed: Option<f64>,
    pub duration: Duration,
    /// Wall-clock time since the start of the run.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxIters,
    /// The benchmarks run a single transmit step.
    SingleStep,
    /// A subproblem failed; the iterate before the failure is kept.
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct Iterate {
    pub v: ReflectVector,
    pub w: TransmitBeamformers,
    pub min_sinr: f64,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub variant: Variant,
    pub records: Vec<IterationRecord>,
    /// The iterate the algorithm ends on.
    pub last: Iterate,
    /// Best iterate seen (differs from `last` only when SDR randomization fluctuates).
    pub best: Iterate,
    pub termination: Termination,
    /// The configuration the iterates refer to (`N = 0` for the no-IRS benchmark).
    pub config: SystemConfig,
}

impl RunTrace {
    pub fn final_min_sinr(&self) -> f64 {
        self.last.min_sinr
    }

    /// The interleaved sequence after-w, after-v, after-w, … of all iterations.
    pub fn objective_sequence(&self) -> Vec<f64> {
        self.records.iter().flat_map(|r| [r.after_w, r.after_v]).collect()
    }
}

pub fn random_phases(n: usize, seed: u64) -> ReflectVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x7a5e);
    let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    ReflectVector::from_phases(&phases)
}

pub fn run(scenario: &ScenarioSpec, opts: &AlgorithmOptions) -> Result<RunTrace> {
    let channels = generate_channels(scenario)?;
    run_with_channels(&channels, &scenario.config, opts)
}

pub fn run_with_channels(channels: &ChannelSet, config: &SystemConfig, opts: &AlgorithmOptions) -> Result<RunTrace> {
    opts.validate()?;
    channels.validate(config)?;
    match opts.variant {
        Variant::NoIrs => single_step(&channels.without_irs(), &config.with_reflectors(0), ReflectVector::zeros(0), opts),
        Variant::RandomPhase => single_step(channels, config, random_phases(config.n(), opts.init_seed()), opts),
        Variant::Sca | Variant::Sdr => alternate(channels, config, opts),
    }
}

fn single_step(channels: &ChannelSet, config: &SystemConfig, v: ReflectVector, opts: &AlgorithmOptions) -> Result<RunTrace> {
    let start = Instant::now();
    let res = solve_p2_from(channels, &v, config, &opts.txbf(), None)?;
    let elapsed = start.elapsed();
    let it = Iterate {
        v,
        w: res.w,
        min_sinr: res.t_star,
    };
    Ok(RunTrace {
        variant: opts.variant,
        records: vec![IterationRecord {
            iteration: 1,
            after_w: res.t_star,
            after_v: res.t_star,
            t_relaxed: None,
            duration: elapsed,
            elapsed,
        }],
        last: it.clone(),
        best: it,
        termination: Termination::SingleStep,
        config: config.clone(),
    })
}

fn alternate(channels: &ChannelSet, config: &SystemConfig, opts: &AlgorithmOptions) -> Result<RunTrace> {
    let start = Instant::now();
    let mut v = match opts.init_v {
        InitReflect::Zero => ReflectVector::zeros(config.n()),
        InitReflect::RandomUnitPhase(seed) => random_phases(config.n(), seed),
    };
    let txbf = opts.txbf();
    let mut w: Option<TransmitBeamformers> = None;
    let mut records = Vec::new();
    let mut last: Option<Iterate> = None;
    let mut best: Option<Iterate> = None;
    let mut termination = Termination::MaxIters;

    for l in 1..=opts.max_iters {
        let t0 = Instant::now();
        let step = || -> Result<(TransmitBeamformers, f64, ReflectVector, f64, Option<f64>)> {
            let tx = solve_p2_from(channels, &v, config, &txbf, w.as_ref())?;
            let data = quadratic_data(channels, &tx.w, config)?;
            match opts.variant {
                Variant::Sca => {
                    let s = sca_update(&v, &data, tx.t_star, config)?;
                    Ok((tx.w, tx.t_star, s.v_new, s.t_after, None))
                }
                _ => {
                    let sdr_opts = SdrOptions {
                        rel_tol: opts.bisection_tol,
                        solver_tol: opts.solver_tol,
                        randomization_count: opts.randomization_count,
                        seed: opts.init_seed() ^ (l as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                        ..Default::default()
                    };
                    let r = sdr_update(&data, config, Some(&v), &sdr_opts)?;
                    Ok((tx.w, tx.t_star, r.v_candidate, r.achieved_min_sinr, Some(r.t_relaxed)))
                }
            }
        };
        let (new_w, after_w, new_v, after_v, t_relaxed) = match step() {
            Ok(out) => out,
            Err(e) if last.is_some() => {
                termination = Termination::Failed(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let now = Instant::now();
        records.push(IterationRecord {
            iteration: l,
            after_w,
            after_v,
            t_relaxed,
            duration: now - t0,
            elapsed: now - start,
        });
        let prev = last.as_ref().map(|it| it.min_sinr);
        let it = Iterate {
            v: new_v.clone(),
            w: new_w.clone(),
            min_sinr: after_v,
        };
        if best.as_ref().is_none_or(|b| after_v > b.min_sinr) {
            best = Some(it.clone());
        }
        last = Some(it);
        v = new_v;
        w = Some(new_w);
        if let Some(p) = prev {
            if after_v - p < opts.epsilon {
                termination = Termination::Converged;
                break;
            }
        }
    }
    let last = last.expect("at least one iteration completed");
    Ok(RunTrace {
        variant: opts.variant,
        records,
        best: best.unwrap_or_else(|| last.clone()),
        last,
        termination,
        config: config.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub algorithm: AlgorithmOptions,
    pub schemes: Vec<Variant>,
    /// Redraw user positions inside the BS triangle for every trial.
    pub random_users: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            algorithm: AlgorithmOptions::default(),
            schemes: Variant::ALL.to_vec(),
            random_users: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub p_max_dbm: f64,
    pub scheme: Variant,
    /// Mean over trials of the per-trial min weighted SINR in dB.
    pub mean_min_sinr_db: f64,
    pub trial_count: usize,
    pub failed: usize,
    /// Per-trial values in dB, in seed order (failed trials omitted).
    pub per_trial_db: Vec<f64>,
    /// Largest `‖w_i‖² − P_i` over all returned iterates.
    pub worst_power_excess: f64,
    /// Largest `|v_n|` over all returned iterates (0 without reflectors).
    pub worst_modulus: f64,
}

/// Runs every scheme on `trials` channel realizations (seeds
/// `base_seed..base_seed + trials`) at each power. All schemes at one power
/// see the same realizations. Rows are ordered by power, then scheme.
pub fn compare_schemes(
    scenario: &ScenarioSpec,
    p_max_dbm: &[f64],
    trials: usize,
    base_seed: u64,
    opts: &CompareOptions,
) -> Result<Vec<SchemeSummary>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    opts.algorithm.validate()?;
    let mut rows = Vec::new();
    for &p in p_max_dbm {
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); opts.schemes.len()];
        let mut failed = vec![0; opts.schemes.len()];
        let mut excess = vec![f64::NEG_INFINITY; opts.schemes.len()];
        let mut modulus = vec![0.0_f64; opts.schemes.len()];
        for t in 0..trials as u64 {
            let seed = base_seed.wrapping_add(t);
            let mut spec = scenario.with_power_dbm(p)?.with_seed(seed);
            if opts.random_users {
                spec = with_random_users(&spec)?;
            }
            let channels = generate_channels(&spec)?;
            for (s, &scheme) in opts.schemes.iter().enumerate() {
                let algo = AlgorithmOptions {
                    variant: scheme,
                    init_v: match opts.algorithm.init_v {
                        InitReflect::Zero => InitReflect::Zero,
                        InitReflect::RandomUnitPhase(_) => InitReflect::RandomUnitPhase(seed),
                    },
                    ..opts.algorithm.clone()
                };
                match run_with_channels(&channels, &spec.config, &algo) {
                    Ok(trace) => {
                        values[s].push(linear_to_db(trace.final_min_sinr()));
                        excess[s] = excess[s].max(trace.last.w.max_power_excess(&trace.config));
                        modulus[s] = modulus[s].max(trace.last.v.max_modulus());
                    }
                    Err(_) => failed[s] += 1,
                }
            }
        }
        for (s, &scheme) in opts.schemes.iter().enumerate() {
            let v = &values[s];
            let mean = if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
            rows.push(SchemeSummary {
                p_max_dbm: p,
                scheme,
                mean_min_sinr_db: mean,
                trial_count: v.len(),
                failed: failed[s],
                per_trial_db: v.clone(),
                worst_power_excess: excess[s],
                worst_modulus: modulus[s],
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVector, C64};
    use crate::model::min_weighted_sinr;
    use crate::model::testutil::*;
    use crate::scenario::paper_default_scenario;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("bogus".parse::<Variant>().is_err());
    }

    #[test]
    fn options_validation() {
        let bad = AlgorithmOptions {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = AlgorithmOptions {
            max_iters: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sca_trace_is_monotone_and_feasible() {
        let cfg = SystemConfig::uniform(3, 2, 6, 1.0, 0.02).unwrap();
        let mut r = rng(1);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let trace = run_with_channels(&ch, &cfg, &AlgorithmOptions::default()).unwrap();
        let seq = trace.objective_sequence();
        for pair in seq.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-6 * pair[0].abs(), "{seq:?}");
        }
        assert!(trace.records.len() <= 30);
        assert!(trace.last.w.max_power_excess(&cfg) <= 1e-6);
        assert!(trace.last.v.max_modulus() <= 1.0 + 1e-8);
        let direct = min_weighted_sinr(&trace.last.v, &trace.last.w, &ch, &cfg).unwrap();
        assert!((direct - trace.final_min_sinr()).abs() <= 1e-9 * direct);
    }

    #[test]
    fn sca_single_user_matches_closed_form() {
        let cfg = SystemConfig::uniform(1, 1, 2, 1.0, 0.1).unwrap();
        let mut r = rng(3);
        for _ in 0..3 {
            let ch = random_channels(&mut r, &cfg, 1.0);
            let trace = run_with_channels(&ch, &cfg, &AlgorithmOptions {
                epsilon: 1e-9,
                max_iters: 100,
                ..Default::default()
            })
            .unwrap();
            // with M = 1 the beamformer is √P times a phase
            let one = TransmitBeamformers(vec![CVector::from_element(1, C64::new(1.0, 0.0))]);
            let data = quadratic_data(&ch, &one, &cfg).unwrap();
            let l1: f64 = data.c[0][0].iter().map(|z| z.norm()).sum::<f64>() + data.d[0][0].norm();
            let closed = l1 * l1 / 0.1;
            assert!((trace.final_min_sinr() - closed).abs() <= 0.01 * closed);
        }
    }

    #[test]
    fn no_irs_equals_zero_reflectors() {
        let cfg = SystemConfig::uniform(2, 2, 4, 1.0, 0.05).unwrap();
        let mut r = rng(4);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let no_irs = run_with_channels(&ch, &cfg, &AlgorithmOptions {
            variant: Variant::NoIrs,
            ..Default::default()
        })
        .unwrap();
        let zero_cfg = cfg.with_reflectors(0);
        let direct = solve_p2_from(&ch.without_irs(), &ReflectVector::zeros(0), &zero_cfg, &TxbfOptions::default(), None).unwrap();
        assert!((no_irs.final_min_sinr() - direct.t_star).abs() <= 1e-12 * direct.t_star);
        assert_eq!(no_irs.termination, Termination::SingleStep);
        assert_eq!(no_irs.config.n(), 0);
    }

    #[test]
    fn sdr_trace_respects_relaxation() {
        let cfg = SystemConfig::uniform(2, 2, 4, 1.0, 0.05).unwrap();
        let mut r = rng(5);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let trace = run_with_channels(&ch, &cfg, &AlgorithmOptions {
            variant: Variant::Sdr,
            max_iters: 5,
            ..Default::default()
        })
        .unwrap();
        for rec in &trace.records {
            assert!(rec.t_relaxed.unwrap() >= rec.after_v - 1e-6 * rec.after_v);
        }
        assert!(trace.best.min_sinr >= trace.last.min_sinr);
    }

    #[test]
    fn compare_is_deterministic() {
        let scen = paper_default_scenario(30.0, 0);
        let opts = CompareOptions {
            algorithm: AlgorithmOptions {
                max_iters: 2,
                randomization_count: 20,
                ..Default::default()
            },
            schemes: vec![Variant::Sca, Variant::RandomPhase, Variant::NoIrs],
            random_users: false,
        };
        let a = compare_schemes(&scen, &[30.0], 1, 7, &opts).unwrap();
        let b = compare_schemes(&scen, &[30.0], 1, 7, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|row| row.trial_count == 1 && row.failed == 0));
        assert!(compare_schemes(&scen, &[30.0], 0, 7, &opts).is_err());
    }
}
