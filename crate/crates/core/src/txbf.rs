//! Coordinated transmit beamforming for a fixed reflect vector: SOC
//! feasibility at a target `t` plus a bisection over `t`.
//!
//! The program variable is the power-normalized stack `w̃ = [w̃_1; …; w̃_K]`
//! with `w_k = √P_k · w̃_k`, lifted to `[Re w̃; Im w̃]`. Each SINR row is divided
//! by `σ_i`, so every constraint has unit-order coefficients regardless of the
//! channel scale.

use crate::conic::{
    ConicSolver, InteriorPoint, LinearConstraint, SocConstraint, SocFeasibilityProgram, SolverStatus,
    DEFAULT_TOL,
};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{CVector, RMatrix, RVector, C64};
use crate::model::{
    effective_channels, sinr_from_effective, weighted_min, ChannelSet, ReflectVector, SystemConfig,
    TransmitBeamformers,
};

#[derive(Debug, Clone)]
pub struct TxbfOptions {
    /// Stop once the bracket is narrower than `rel_tol` times its upper end.
    pub rel_tol: f64,
    pub solver_tol: f64,
    pub max_bisections: usize,
}

impl Default for TxbfOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            solver_tol: DEFAULT_TOL,
            max_bisections: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TxbfResult {
    pub w: TransmitBeamformers,
    /// Min weighted SINR achieved by `w`, evaluated directly.
    pub t_star: f64,
    pub bisection_iters: usize,
    pub bracket_width: f64,
    /// Upper end of the final bracket; no beamformer can exceed it.
    pub upper_bound: f64,
}

/// Column offsets of `Re w̃_k[m]` and `Im w̃_k[m]` in the lifted variable.
struct Layout {
    k: usize,
    m: usize,
}

impl Layout {
    fn vars(&self) -> usize {
        2 * self.k * self.m
    }
    fn re(&self, k: usize, m: usize) -> usize {
        k * self.m + m
    }
    fn im(&self, k: usize, m: usize) -> usize {
        self.k * self.m + k * self.m + m
    }

    /// Rows giving `Re(bᴴ w̃_k)` and `Im(bᴴ w̃_k)`.
    fn inner_rows(&self, b: &CVector, k: usize) -> (RVector, RVector) {
        let mut re = RVector::zeros(self.vars());
        let mut im = RVector::zeros(self.vars());
        for (m, z) in b.iter().enumerate() {
            re[self.re(k, m)] = z.re;
            re[self.im(k, m)] = z.im;
            im[self.re(k, m)] = -z.im;
            im[self.im(k, m)] = z.re;
        }
        (re, im)
    }

    fn beamformers(&self, x: &RVector, config: &SystemConfig) -> TransmitBeamformers {
        TransmitBeamformers(
            (0..self.k)
                .map(|k| {
                    let scale = config.power_budget()[k].sqrt();
                    let mut wk = CVector::from_fn(self.m, |m, _| C64::new(x[self.re(k, m)], x[self.im(k, m)]));
                    let norm = wk.norm();
                    if norm > 1.0 {
                        wk /= C64::new(norm, 0.0);
                    }
                    wk * C64::new(scale, 0.0)
                })
                .collect(),
        )
    }
}

fn check_effective(a: &[Vec<CVector>], config: &SystemConfig) -> Result<()> {
    check_dim("effective channel rows", config.k(), a.len())?;
    for row in a {
        check_dim("effective channel cols", config.k(), row.len())?;
        for aik in row {
            check_dim("effective channel length", config.m(), aik.len())?;
        }
    }
    Ok(())
}

/// SOC feasibility program for target `t > 0` over the power-normalized,
/// lifted beamformers.
pub fn build_p22(t: f64, a: &[Vec<CVector>], config: &SystemConfig) -> Result<SocFeasibilityProgram> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("target SINR must be positive, got {t}")));
    }
    check_effective(a, config)?;
    let (k, m) = (config.k(), config.m());
    let lay = Layout { k, m };
    let n = lay.vars();
    let mut prog = SocFeasibilityProgram::new(n);
    for i in 0..k {
        let sigma = config.noise_power()[i].sqrt();
        let row_of = |j: usize| {
            let b = &a[i][j] * C64::new(config.power_budget()[j].sqrt() / sigma, 0.0);
            lay.inner_rows(&b, j)
        };
        let (sig_re, sig_im) = row_of(i);
        let mut f = RMatrix::zeros(2 * k, n);
        let mut r = 0;
        for j in (0..k).filter(|&j| j != i) {
            let (re, im) = row_of(j);
            f.row_mut(r).copy_from(&re.transpose());
            f.row_mut(r + 1).copy_from(&im.transpose());
            r += 2;
        }
        f.row_mut(r).copy_from(&sig_re.transpose());
        let mut g = RVector::zeros(2 * k);
        g[2 * k - 1] = 1.0;
        let coef = (1.0 + 1.0 / (config.weight()[i] * t)).sqrt();
        prog.soc.push(SocConstraint {
            f,
            g,
            c: &sig_re * coef,
            b: 0.0,
        });
        prog.linear_ineq.push(LinearConstraint { row: sig_re, rhs: 0.0 });
        prog.linear_eq.push(LinearConstraint { row: sig_im, rhs: 0.0 });
    }
    for j in 0..k {
        let mut f = RMatrix::zeros(2 * m, n);
        for mm in 0..m {
            f[(mm, lay.re(j, mm))] = 1.0;
            f[(m + mm, lay.im(j, mm))] = 1.0;
        }
        prog.soc.push(SocConstraint {
            f,
            g: RVector::zeros(2 * m),
            c: RVector::zeros(n),
            b: 1.0,
        });
    }
    Ok(prog)
}

/// Maximum-ratio transmission at full power on each cell's own effective channel.
pub fn mrt(a: &[Vec<CVector>], config: &SystemConfig) -> TransmitBeamformers {
    TransmitBeamformers(
        (0..config.k())
            .map(|i| {
                let aii = &a[i][i];
                let norm = aii.norm();
                if norm > 0.0 {
                    aii * C64::new(config.power_budget()[i].sqrt() / norm, 0.0)
                } else {
                    CVector::zeros(config.m())
                }
            })
            .collect(),
    )
}

/// Interference-free bound `min_i P_i ‖a_ii‖² / (α_i σ_i²)` on the min weighted SINR.
pub fn snr_bound(a: &[Vec<CVector>], config: &SystemConfig) -> f64 {
    (0..config.k())
        .map(|i| {
            config.power_budget()[i] * a[i][i].norm_squared()
                / (config.weight()[i] * config.noise_power()[i])
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn solve_p2(
    channels: &ChannelSet,
    v: &ReflectVector,
    config: &SystemConfig,
    opts: &TxbfOptions,
) -> Result<TxbfResult> {
    solve_p2_from(channels, v, config, opts, None)
}

/// Bisection with an optional incumbent: the returned beamformers are never
/// worse than `incumbent` (if it is feasible).
pub fn solve_p2_from(
    channels: &ChannelSet,
    v: &ReflectVector,
    config: &SystemConfig,
    opts: &TxbfOptions,
    incumbent: Option<&TransmitBeamformers>,
) -> Result<TxbfResult> {
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bisection tolerance must be positive, got {}", opts.rel_tol)));
    }
    let a = effective_channels(v, channels, config)?;
    solve_p2_effective(&a, config, opts, incumbent)
}

pub fn solve_p2_effective(
    a: &[Vec<CVector>],
    config: &SystemConfig,
    opts: &TxbfOptions,
    incumbent: Option<&TransmitBeamformers>,
) -> Result<TxbfResult> {
    check_effective(a, config)?;
    let lay = Layout {
        k: config.k(),
        m: config.m(),
    };
    let value = |w: &TransmitBeamformers| weighted_min(&sinr_from_effective(a, w, config), config);

    let mut best_w = mrt(a, config);
    let mut lo = value(&best_w);
    if let Some(inc) = incumbent {
        check_dim("incumbent beamformers", config.k(), inc.0.len())?;
        if inc.max_power_excess(config) <= 1e-9 * config.power_budget().iter().cloned().fold(1.0, f64::max) {
            let t = value(inc);
            if t > lo {
                lo = t;
                best_w = inc.clone();
            }
        }
    }
    let mut hi = snr_bound(a, config).max(lo);
    let solver = InteriorPoint::default();
    let mut iters = 0;
    while hi - lo > opts.rel_tol * hi && iters < opts.max_bisections {
        iters += 1;
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let prog = build_p22(mid, a, config)?;
        let out = solver.soc_feasibility(&prog, opts.solver_tol)?;
        match out.status {
            SolverStatus::Feasible | SolverStatus::Optimal => {
                let x = out.point.expect("feasible outcome carries a point");
                let w = lay.beamformers(&x, config);
                let achieved = value(&w);
                if achieved > value(&best_w) {
                    best_w = w;
                }
                lo = mid.max(achieved).min(hi);
            }
            SolverStatus::Infeasible => hi = mid,
            SolverStatus::NumericalFailure => {
                return Err(Error::Bisection {
                    t: mid,
                    lo,
                    hi,
                    reason: format!("SOC solver failed (residual {:.3e})", out.certificate_gap),
                })
            }
        }
    }
    let t_star = value(&best_w);
    Ok(TxbfResult {
        w: best_w,
        t_star,
        bisection_iters: iters,
        bracket_width: hi - lo,
        upper_bound: hi,
    })
}
