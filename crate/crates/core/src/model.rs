//! System configuration, channel containers, effective channels and SINR
//! evaluation.
//!
//! Users and base stations share the index set `0..K`: BS `i` serves user `i`.
//! The reflection matrix of the surface is never formed; every reflected path
//! is expressed through the reflect vector `v` and the cascaded channel
//! `Φ_{i,k} = diag(f_iᴴ) G_k`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Dimensions, power budgets, weights and noise levels. All powers in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    k: usize,
    m: usize,
    n: usize,
    power_budget: Vec<f64>,
    weight: Vec<f64>,
    noise_power: Vec<f64>,
}

impl SystemConfig {
    pub fn new(
        k: usize,
        m: usize,
        n: usize,
        power_budget: Vec<f64>,
        weight: Vec<f64>,
        noise_power: Vec<f64>,
    ) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidArgument(format!(
                "need at least one cell and one antenna, got K={k}, M={m}"
            )));
        }
        check_dim("power_budget", k, power_budget.len())?;
        check_dim("weight", k, weight.len())?;
        check_dim("noise_power", k, noise_power.len())?;
        let positive = |name: &str, xs: &[f64]| -> Result<()> {
            match xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                Some(bad) => Err(Error::InvalidArgument(format!(
                    "{name} entries must be finite and positive, found {bad}"
                ))),
                None => Ok(()),
            }
        };
        positive("power_budget", &power_budget)?;
        positive("weight", &weight)?;
        positive("noise_power", &noise_power)?;
        Ok(Self {
            k,
            m,
            n,
            power_budget,
            weight,
            noise_power,
        })
    }

    /// Equal budgets, unit weights and equal noise for every cell.
    pub fn uniform(k: usize, m: usize, n: usize, power: f64, noise: f64) -> Result<Self> {
        Self::new(k, m, n, vec![power; k], vec![1.0; k], vec![noise; k])
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn power_budget(&self) -> &[f64] {
        &self.power_budget
    }
    pub fn weight(&self) -> &[f64] {
        &self.weight
    }
    pub fn noise_power(&self) -> &[f64] {
        &self.noise_power
    }

    /// Same system with a different reflector count (used by the no-IRS benchmark).
    pub fn with_reflectors(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    /// Same system with every power budget replaced.
    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(
            self.k,
            self.m,
            self.n,
            vec![power; self.k],
            self.weight.clone(),
            self.noise_power.clone(),
        )
    }
}

/// One channel realization.
///
/// * `bs_to_irs[k]`: `N×M` matrix `G_k` from BS `k` to the surface.
/// * `irs_to_user[i]`: length-`N` vector `f_i` from the surface to user `i`.
/// * `bs_to_user[i][k]`: length-`M` vector `h_{i,k}` from BS `k` to user `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub bs_to_irs: Vec<CMatrix>,
    pub irs_to_user: Vec<CVector>,
    pub bs_to_user: Vec<Vec<CVector>>,
}

impl ChannelSet {
    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        let (k, m, n) = (config.k(), config.m(), config.n());
        check_dim("bs_to_irs count", k, self.bs_to_irs.len())?;
        check_dim("irs_to_user count", k, self.irs_to_user.len())?;
        check_dim("bs_to_user rows", k, self.bs_to_user.len())?;
        for g in &self.bs_to_irs {
            check_dim("bs_to_irs rows", n, g.nrows())?;
            check_dim("bs_to_irs cols", m, g.ncols())?;
            if g.iter().any(|z| !z.is_finite()) {
                return Err(Error::InvalidArgument("non-finite BS→IRS channel".into()));
            }
        }
        for f in &self.irs_to_user {
            check_dim("irs_to_user length", n, f.len())?;
            if f.iter().any(|z| !z.is_finite()) {
                return Err(Error::InvalidArgument("non-finite IRS→user channel".into()));
            }
        }
        for row in &self.bs_to_user {
            check_dim("bs_to_user cols", k, row.len())?;
            for h in row {
                check_dim("bs_to_user length", m, h.len())?;
                if h.iter().any(|z| !z.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite BS→user channel".into()));
                }
            }
        }
        Ok(())
    }

    /// Cascaded channel `Φ_{i,k}` from BS `k` via the surface to user `i`.
    pub fn cascaded(&self, i: usize, k: usize) -> CMatrix {
        reflect_channel(&self.irs_to_user[i], &self.bs_to_irs[k])
            .expect("channel set validated against its config")
    }

    /// The same realization with the surface removed (`N = 0`).
    pub fn without_irs(&self) -> Self {
        let k = self.bs_to_user.len();
        let m = self.bs_to_user.first().and_then(|r| r.first()).map_or(0, |h| h.len());
        Self {
            bs_to_irs: vec![CMatrix::zeros(0, m); k],
            irs_to_user: vec![CVector::zeros(0); k],
            bs_to_user: self.bs_to_user.clone(),
        }
    }
}

/// Transmit beamformers `w_i`, one per BS.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitBeamformers(pub Vec<CVector>);

impl TransmitBeamformers {
    pub fn zeros(config: &SystemConfig) -> Self {
        Self(vec![CVector::zeros(config.m()); config.k()])
    }

    pub fn power(&self, i: usize) -> f64 {
        self.0[i].norm_squared()
    }

    /// Largest `‖w_i‖² − P_i` over all BSs (non-positive when feasible).
    pub fn max_power_excess(&self, config: &SystemConfig) -> f64 {
        self.0
            .iter()
            .zip(config.power_budget())
            .map(|(w, p)| w.norm_squared() - p)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Reflect vector `v` with `|v_n| ≤ 1`; phase `arg v_n`, amplitude `|v_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectVector(pub CVector);

impl ReflectVector {
    pub fn zeros(n: usize) -> Self {
        Self(CVector::zeros(n))
    }

    /// Unit-amplitude vector from phases in radians.
    pub fn from_phases(phases: &[f64]) -> Self {
        Self(CVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| C64::from_polar(1.0, p)),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Per-pair quadratic-form data for a fixed set of transmit beamformers:
/// `|(vᴴΦ_{i,k} + h_{i,k}ᴴ) w_k|² = vᴴ C v + 2 Re(vᴴ u) + |d|²`.
#[derive(Debug, Clone)]
pub struct QuadraticData {
    /// `c[i][k] = Φ_{i,k} w_k`
    pub c: Vec<Vec<CVector>>,
    /// `d[i][k] = h_{i,k}ᴴ w_k`
    pub d: Vec<Vec<C64>>,
    /// `C[i][k] = c cᴴ`
    pub big_c: Vec<Vec<CMatrix>>,
    /// `u[i][k] = c d*`
    pub u: Vec<Vec<CVector>>,
}

impl QuadraticData {
    pub fn k(&self) -> usize {
        self.c.len()
    }

    pub fn n(&self) -> usize {
        self.c.first().and_then(|r| r.first()).map_or(0, |c| c.len())
    }

    /// `vᴴ C_{i,k} v + 2 Re(vᴴ u_{i,k}) + |d_{i,k}|²`, evaluated from the stored
    /// matrices.
    pub fn pair_power(&self, v: &CVector, i: usize, k: usize) -> f64 {
        let quad = v.dotc(&(&self.big_c[i][k] * v)).re;
        let lin = 2.0 * v.dotc(&self.u[i][k]).re;
        quad + lin + self.d[i][k].norm_sqr()
    }

    /// Received signal power of user `i` from its own BS.
    pub fn signal(&self, v: &CVector, i: usize) -> f64 {
        self.pair_power(v, i, i)
    }

    /// Interference power at user `i` (noise excluded).
    pub fn interference(&self, v: &CVector, i: usize) -> f64 {
        (0..self.k())
            .filter(|&k| k != i)
            .map(|k| self.pair_power(v, i, k))
            .sum()
    }

    /// SINR vector computed through the quadratic forms only.
    pub fn sinr(&self, v: &CVector, config: &SystemConfig) -> Vec<f64> {
        (0..self.k())
            .map(|i| self.signal(v, i) / (self.interference(v, i) + config.noise_power()[i]))
            .collect()
    }

    pub fn min_weighted_sinr(&self, v: &CVector, config: &SystemConfig) -> f64 {
        self.sinr(v, config)
            .iter()
            .zip(config.weight())
            .map(|(g, a)| g / a)
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Φ = diag(fᴴ) G`: row `n` of `G` scaled by `conj(f[n])`.
pub fn reflect_channel(f: &CVector, g: &CMatrix) -> Result<CMatrix> {
    check_dim("reflect_channel", g.nrows(), f.len())?;
    let mut phi = g.clone();
    for (n, mut row) in phi.row_iter_mut().enumerate() {
        row *= f[n].conj();
    }
    Ok(phi)
}

/// Effective channel `a = Φᴴ v + h`.
pub fn effective_channel(v: &ReflectVector, phi: &CMatrix, h: &CVector) -> Result<CVector> {
    check_dim("effective_channel: v vs Φ rows", phi.nrows(), v.len())?;
    check_dim("effective_channel: h vs Φ cols", phi.ncols(), h.len())?;
    if v.is_empty() {
        return Ok(h.clone());
    }
    Ok(phi.ad_mul(&v.0) + h)
}

/// All effective channels `a[i][k]` for a reflect vector.
pub fn effective_channels(
    v: &ReflectVector,
    channels: &ChannelSet,
    config: &SystemConfig,
) -> Result<Vec<Vec<CVector>>> {
    channels.validate(config)?;
    check_dim("reflect vector", config.n(), v.len())?;
    (0..config.k())
        .map(|i| {
            (0..config.k())
                .map(|k| {
                    effective_channel(v, &channels.cascaded(i, k), &channels.bs_to_user[i][k])
                })
                .collect()
        })
        .collect()
}

/// Builds `c, d, C, u` for every user/BS pair.
pub fn quadratic_data(
    channels: &ChannelSet,
    w: &TransmitBeamformers,
    config: &SystemConfig,
) -> Result<QuadraticData> {
    channels.validate(config)?;
    check_dim("beamformer count", config.k(), w.0.len())?;
    for wk in &w.0 {
        check_dim("beamformer length", config.m(), wk.len())?;
    }
    let k = config.k();
    let mut c = Vec::with_capacity(k);
    let mut d = Vec::with_capacity(k);
    let mut big_c = Vec::with_capacity(k);
    let mut u = Vec::with_capacity(k);
    for i in 0..k {
        let mut c_row = Vec::with_capacity(k);
        let mut d_row = Vec::with_capacity(k);
        let mut cc_row = Vec::with_capacity(k);
        let mut u_row = Vec::with_capacity(k);
        for kk in 0..k {
            let cik = channels.cascaded(i, kk) * &w.0[kk];
            let dik = channels.bs_to_user[i][kk].dotc(&w.0[kk]);
            cc_row.push(&cik * cik.adjoint());
            u_row.push(&cik * dik.conj());
            c_row.push(cik);
            d_row.push(dik);
        }
        c.push(c_row);
        d.push(d_row);
        big_c.push(cc_row);
        u.push(u_row);
    }
    Ok(QuadraticData { c, d, big_c, u })
}

/// Per-user SINR with interference treated as noise.
pub fn sinr(
    v: &ReflectVector,
    w: &TransmitBeamformers,
    channels: &ChannelSet,
    config: &SystemConfig,
) -> Result<Vec<f64>> {
    check_dim("beamformer count", config.k(), w.0.len())?;
    let a = effective_channels(v, channels, config)?;
    Ok(sinr_from_effective(&a, w, config))
}

/// SINR from precomputed effective channels `a[i][k]`.
pub fn sinr_from_effective(
    a: &[Vec<CVector>],
    w: &TransmitBeamformers,
    config: &SystemConfig,
) -> Vec<f64> {
    let k = config.k();
    (0..k)
        .map(|i| {
            let signal = a[i][i].dotc(&w.0[i]).norm_sqr();
            let interference: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| a[i][j].dotc(&w.0[j]).norm_sqr())
                .sum();
            signal / (interference + config.noise_power()[i])
        })
        .collect()
}

/// `min_i γ_i / α_i`.
pub fn min_weighted_sinr(
    v: &ReflectVector,
    w: &TransmitBeamformers,
    channels: &ChannelSet,
    config: &SystemConfig,
) -> Result<f64> {
    Ok(weighted_min(&sinr(v, w, channels, config)?, config))
}

pub(crate) fn weighted_min(gamma: &[f64], config: &SystemConfig) -> f64 {
    gamma
        .iter()
        .zip(config.weight())
        .map(|(g, a)| g / a)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn cvec(rng: &mut impl Rng, n: usize, scale: f64) -> CVector {
        CVector::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        })
    }

    pub fn cmat(rng: &mut impl Rng, r: usize, c: usize, scale: f64) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        })
    }

    pub fn random_channels(rng: &mut impl Rng, config: &SystemConfig, scale: f64) -> ChannelSet {
        let (k, m, n) = (config.k(), config.m(), config.n());
        ChannelSet {
            bs_to_irs: (0..k).map(|_| cmat(rng, n, m, scale.sqrt())).collect(),
            irs_to_user: (0..k).map(|_| cvec(rng, n, scale.sqrt())).collect(),
            bs_to_user: (0..k)
                .map(|_| (0..k).map(|_| cvec(rng, m, scale)).collect())
                .collect(),
        }
    }

    pub fn random_beams(rng: &mut impl Rng, config: &SystemConfig) -> TransmitBeamformers {
        TransmitBeamformers((0..config.k()).map(|_| cvec(rng, config.m(), 1.0)).collect())
    }

    pub fn random_reflect(rng: &mut impl Rng, n: usize) -> ReflectVector {
        ReflectVector(cvec(rng, n, 0.7))
    }
}
