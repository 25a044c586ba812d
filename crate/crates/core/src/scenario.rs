//! Simulation scenarios: node placement, distance-based path loss and seeded
//! channel draws.
//!
//! BS→surface links are deterministic line-of-sight outer products of
//! half-wavelength linear-array steering vectors (both arrays along the
//! x-axis). BS→user and surface→user links are Rayleigh faded.
//!
//! Randomness comes from ChaCha8 keyed by the scenario seed. Every link gets
//! its own stream id `(kind << 32) | (i << 16) | k`, so the draw for one link
//! never depends on how many other links exist.

use crate::error::{Error, Result};
use crate::linalg::{db_to_linear, CVector, C64};
use crate::model::{ChannelSet, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub bs_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    pub irs_position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub c0_db: f64,
    pub d0_m: f64,
    pub exponent_bs_user: f64,
    pub exponent_bs_irs: f64,
    pub exponent_irs_user: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            c0_db: -30.0,
            d0_m: 1.0,
            exponent_bs_user: 3.6,
            exponent_bs_irs: 2.0,
            exponent_irs_user: 2.5,
        }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        let exps = [self.exponent_bs_user, self.exponent_bs_irs, self.exponent_irs_user];
        if !(self.d0_m > 0.0 && self.d0_m.is_finite()) || !self.c0_db.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "path loss needs finite C0 and d0 > 0, got C0={} dB, d0={} m",
                self.c0_db, self.d0_m
            )));
        }
        if exps.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(Error::InvalidArgument(format!("path-loss exponents must be >= 0, got {exps:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub config: SystemConfig,
    pub geometry: Geometry,
    pub path_loss: PathLossModel,
    pub seed: u64,
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.path_loss.validate()?;
        let k = self.config.k();
        let g = &self.geometry;
        if g.bs_positions.len() != k || g.user_positions.len() != k {
            return Err(Error::InvalidArgument(format!(
                "geometry lists {} BSs and {} users for K={k}",
                g.bs_positions.len(),
                g.user_positions.len()
            )));
        }
        let all = g.bs_positions.iter().chain(&g.user_positions).chain([&g.irs_position]);
        if all.flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("node coordinates must be finite".into()));
        }
        for (b, bs) in g.bs_positions.iter().enumerate() {
            if distance(*bs, g.irs_position) <= 0.0 {
                return Err(Error::InvalidArgument(format!("BS {b} coincides with the IRS")));
            }
            for (u, user) in g.user_positions.iter().enumerate() {
                if distance(*bs, *user) <= 0.0 {
                    return Err(Error::InvalidArgument(format!("BS {b} coincides with user {u}")));
                }
            }
        }
        for (u, user) in g.user_positions.iter().enumerate() {
            if distance(*user, g.irs_position) <= 0.0 {
                return Err(Error::InvalidArgument(format!("user {u} coincides with the IRS")));
            }
        }
        Ok(())
    }

    /// Same scenario with every power budget set to `p_max_dbm`.
    pub fn with_power_dbm(&self, p_max_dbm: f64) -> Result<Self> {
        Ok(Self {
            config: self.config.with_power(dbm_to_watts(p_max_dbm))?,
            ..self.clone()
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// `10^(C0/10) · (d/d0)^(−exponent)`.
pub fn path_loss_linear(d: f64, exponent: f64, model: &PathLossModel) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("distance must be positive, got {d}")));
    }
    Ok(db_to_linear(model.c0_db) * (d / model.d0_m).powf(-exponent))
}

pub const PAPER_NOISE_DBM: f64 = -80.0;

/// Three cells, two BS antennas, twenty reflectors; users clustered near the
/// origin with the surface just below them.
pub fn paper_default_scenario(p_max_dbm: f64, seed: u64) -> ScenarioSpec {
    let k = 3;
    let config = SystemConfig::uniform(k, 2, 20, dbm_to_watts(p_max_dbm), dbm_to_watts(PAPER_NOISE_DBM))
        .expect("built-in constants are valid");
    ScenarioSpec {
        config,
        geometry: Geometry {
            bs_positions: vec![[-100.0, 0.0], [100.0, 0.0], [0.0, 100.0]],
            user_positions: vec![[-5.0, 0.0], [5.0, 0.0], [0.0, 5.0]],
            irs_position: [0.0, -10.0],
        },
        path_loss: PathLossModel::default(),
        seed,
    }
}

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    BsUser = 1,
    IrsUser = 2,
    UserDrop = 3,
}

fn stream_rng(seed: u64, kind: Stream, i: usize, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((kind as u64) << 32) | ((i as u64) << 16) | k as u64);
    rng
}

/// One circularly-symmetric complex Gaussian draw with `E|x|² = variance`.
fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> C64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt() * (variance / 2.0).sqrt();
    C64::from_polar(r, TAU * u2)
}

fn rayleigh_vector(rng: &mut impl Rng, len: usize, variance: f64) -> CVector {
    CVector::from_fn(len, |_, _| complex_gaussian(rng, variance))
}

/// Half-wavelength ULA response along the x-axis for a departure/arrival direction.
fn steering(len: usize, from: Point, to: Point) -> CVector {
    let sin = (to[0] - from[0]) / distance(from, to);
    CVector::from_fn(len, |n, _| C64::from_polar(1.0, PI * n as f64 * sin))
}

pub fn generate_channels(spec: &ScenarioSpec) -> Result<ChannelSet> {
    spec.validate()?;
    let cfg = &spec.config;
    let (k, m, n) = (cfg.k(), cfg.m(), cfg.n());
    let g = &spec.geometry;
    let pl = &spec.path_loss;

    let mut bs_to_irs = Vec::with_capacity(k);
    for bs in &g.bs_positions {
        let gain = path_loss_linear(distance(*bs, g.irs_position), pl.exponent_bs_irs, pl)?;
        let arrival = steering(n, g.irs_position, *bs);
        let departure = steering(m, *bs, g.irs_position);
        bs_to_irs.push(arrival * departure.adjoint() * C64::new(gain.sqrt(), 0.0));
    }
    let mut irs_to_user = Vec::with_capacity(k);
    for (i, user) in g.user_positions.iter().enumerate() {
        let gain = path_loss_linear(distance(*user, g.irs_position), pl.exponent_irs_user, pl)?;
        irs_to_user.push(rayleigh_vector(&mut stream_rng(spec.seed, Stream::IrsUser, i, 0), n, gain));
    }
    let mut bs_to_user = Vec::with_capacity(k);
    for (i, user) in g.user_positions.iter().enumerate() {
        let mut row = Vec::with_capacity(k);
        for (b, bs) in g.bs_positions.iter().enumerate() {
            let gain = path_loss_linear(distance(*bs, *user), pl.exponent_bs_user, pl)?;
            row.push(rayleigh_vector(&mut stream_rng(spec.seed, Stream::BsUser, i, b), m, gain));
        }
        bs_to_user.push(row);
    }
    let channels = ChannelSet {
        bs_to_irs,
        irs_to_user,
        bs_to_user,
    };
    channels.validate(cfg)?;
    Ok(channels)
}

/// Uniform point in the triangle `abc` by folded barycentric sampling.
pub fn sample_in_triangle(rng: &mut impl Rng, [a, b, c]: [Point; 3]) -> Point {
    let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    [
        a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
        a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
    ]
}

/// Barycentric coordinates of `p` with respect to `abc`.
pub fn barycentric(p: Point, [a, b, c]: [Point; 3]) -> [f64; 3] {
    let det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
    let l1 = ((b[1] - c[1]) * (p[0] - c[0]) + (c[0] - b[0]) * (p[1] - c[1])) / det;
    let l2 = ((c[1] - a[1]) * (p[0] - c[0]) + (a[0] - c[0]) * (p[1] - c[1])) / det;
    [l1, l2, 1.0 - l1 - l2]
}

/// Replaces the user positions with independent uniform draws inside the
/// triangle spanned by the first three BSs. Draws come from their own stream
/// of `spec.seed`, so channels and placements stay reproducible together.
pub fn with_random_users(spec: &ScenarioSpec) -> Result<ScenarioSpec> {
    let bs = &spec.geometry.bs_positions;
    if bs.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "random user placement needs exactly three BSs, got {}",
            bs.len()
        )));
    }
    let tri = [bs[0], bs[1], bs[2]];
    let users = (0..spec.config.k())
        .map(|i| sample_in_triangle(&mut stream_rng(spec.seed, Stream::UserDrop, i, 0), tri))
        .collect();
    let mut out = spec.clone();
    out.geometry.user_positions = users;
    Ok(out)
}
