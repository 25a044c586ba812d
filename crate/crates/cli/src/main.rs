use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use irs_maxmin_cli::{run_experiment, ExperimentConfig, ExperimentKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "irs-maxmin", version, about = "Max-min SINR beamforming experiments with an intelligent reflecting surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-iteration min SINR of the SCA and SDR algorithms.
    Convergence(Overrides),
    /// Mean min SINR per scheme versus transmit power.
    PowerSweep(Overrides),
    /// Power sweep with users redrawn inside the BS triangle every trial.
    RandomUsers(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// TOML file with [scenario], [algorithm] and [experiment] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated powers in dBm. The convergence run uses the last one.
    #[arg(long, value_delimiter = ',')]
    pmax: Option<Vec<f64>>,
    /// sca, sdr, random-phase, no-irs or all.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
}

impl Overrides {
    fn apply(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let e = &mut cfg.experiment;
        if let Some(out) = self.out {
            e.out_dir = out;
        }
        if let Some(seed) = self.seed {
            e.seed = seed;
        }
        if let Some(trials) = self.trials {
            e.trials = trials;
        }
        if let Some(p) = self.pmax {
            if let Some(&last) = p.last() {
                e.convergence_p_max_dbm = last;
            }
            e.p_max_dbm = p;
        }
        let a = &mut cfg.algorithm;
        if let Some(v) = self.variant {
            a.variant = v;
        }
        if let Some(n) = self.max_iters {
            a.max_iters = n;
        }
        if let Some(eps) = self.epsilon {
            a.epsilon = eps;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, overrides) = match cli.command {
        Command::Convergence(o) => (ExperimentKind::Convergence, o),
        Command::PowerSweep(o) => (ExperimentKind::PowerSweep, o),
        Command::RandomUsers(o) => (ExperimentKind::RandomUsersSweep, o),
    };
    match overrides.apply().and_then(|cfg| run_experiment(&cfg, kind)) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
