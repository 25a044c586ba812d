//! Reflect-vector update by semidefinite relaxation.
//!
//! With `v̄ = [v; 1]` every received power is `v̄ᴴ R v̄ + |d|²` for the lifted
//! matrix `R = [[C, u], [uᴴ, 0]]`. Replacing `v̄ v̄ᴴ` by a PSD matrix `V` with
//! `V_nn ≤ 1` and a unit last entry turns the max-min problem into a sequence
//! of PSD feasibility checks; a unit-modulus vector is then recovered by
//! Gaussian randomization.

use crate::conic::{
    ConicSolver, EntryConstraint, InteriorPoint, PsdFeasibilityProgram, Sense, SolverStatus,
    TraceConstraint, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, CVector, C64};
use crate::model::{QuadraticData, ReflectVector, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct LiftedData {
    /// `r[i][k] = [[C_ik, u_ik], [u_ikᴴ, 0]]`
    pub r: Vec<Vec<CMatrix>>,
    pub d_abs2: Vec<Vec<f64>>,
}

impl LiftedData {
    pub fn k(&self) -> usize {
        self.r.len()
    }

    /// Size of the lifted variable, `N + 1`.
    pub fn dim(&self) -> usize {
        self.r.first().and_then(|row| row.first()).map_or(1, |m| m.nrows())
    }
}

#[derive(Debug, Clone)]
pub struct SdrOptions {
    pub rel_tol: f64,
    pub solver_tol: f64,
    pub randomization_count: usize,
    pub seed: u64,
    pub max_bisections: usize,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            solver_tol: DEFAULT_TOL,
            randomization_count: 200,
            seed: 0,
            max_bisections: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdrResult {
    pub v_star: CMatrix,
    /// Largest `t` certified feasible for the relaxation.
    pub t_relaxed: f64,
    /// Upper end of the final bisection bracket.
    pub t_upper: f64,
    pub v_candidate: ReflectVector,
    pub achieved_min_sinr: f64,
    pub rank_one_exact: bool,
    pub bisection_iters: usize,
}

pub fn lift(data: &QuadraticData) -> LiftedData {
    let k = data.k();
    let n = data.n();
    let mut r = Vec::with_capacity(k);
    let mut d_abs2 = Vec::with_capacity(k);
    for i in 0..k {
        let mut r_row = Vec::with_capacity(k);
        let mut d_row = Vec::with_capacity(k);
        for kk in 0..k {
            let mut m = CMatrix::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(&data.big_c[i][kk]);
            let u = &data.u[i][kk];
            for row in 0..n {
                m[(row, n)] = u[row];
                m[(n, row)] = u[row].conj();
            }
            r_row.push(m);
            d_row.push(data.d[i][kk].norm_sqr());
        }
        r.push(r_row);
        d_abs2.push(d_row);
    }
    LiftedData { r, d_abs2 }
}

/// `v̄ᴴ R_ik v̄` for `v̄ = [v; 1]`.
pub fn lifted_form(lifted: &LiftedData, v: &CVector, i: usize, k: usize) -> f64 {
    let vbar = augment(v);
    vbar.dotc(&(&lifted.r[i][k] * &vbar)).re
}

fn augment(v: &CVector) -> CVector {
    let n = v.len();
    CVector::from_fn(n + 1, |j, _| if j < n { v[j] } else { C64::new(1.0, 0.0) })
}

/// `Re Tr(R V)`
fn trace_with(r: &CMatrix, v: &CMatrix) -> f64 {
    r.iter().zip(v.transpose().iter()).map(|(a, b)| (a * b).re).sum()
}

/// Min weighted SINR implied by a lifted matrix `V` (equal to the true value
/// when `V = v̄v̄ᴴ`).
pub fn lifted_min_sinr(lifted: &LiftedData, v: &CMatrix, config: &SystemConfig) -> f64 {
    let k = lifted.k();
    (0..k)
        .map(|i| {
            let signal = trace_with(&lifted.r[i][i], v) + lifted.d_abs2[i][i];
            let interference: f64 = (0..k)
                .filter(|&kk| kk != i)
                .map(|kk| trace_with(&lifted.r[i][kk], v) + lifted.d_abs2[i][kk])
                .sum();
            signal / (interference + config.noise_power()[i]) / config.weight()[i]
        })
        .fold(f64::INFINITY, f64::min)
}

/// PSD feasibility program for target `t ≥ 0`. Each SINR row is rescaled to
/// unit magnitude; scaling does not change the feasible set.
pub fn build_p34(t: f64, lifted: &LiftedData, config: &SystemConfig) -> Result<PsdFeasibilityProgram> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("target SINR must be non-negative, got {t}")));
    }
    let k = lifted.k();
    let dim = lifted.dim();
    let mut prog = PsdFeasibilityProgram::new(dim);
    for i in 0..k {
        let at = config.weight()[i] * t;
        let mut h = lifted.r[i][i].clone();
        let mut rhs = at * config.noise_power()[i] - lifted.d_abs2[i][i];
        for kk in (0..k).filter(|&kk| kk != i) {
            h -= &lifted.r[i][kk] * C64::new(at, 0.0);
            rhs += at * lifted.d_abs2[i][kk];
        }
        let scale = h.norm().max(rhs.abs()).max(f64::MIN_POSITIVE);
        h /= C64::new(scale, 0.0);
        prog.trace.push(TraceConstraint {
            h,
            rhs: rhs / scale,
            sense: Sense::Ge,
        });
    }
    for index in 0..dim - 1 {
        prog.entries.push(EntryConstraint {
            index,
            bound: 1.0,
            sense: Sense::Le,
        });
    }
    prog.entries.push(EntryConstraint {
        index: dim - 1,
        bound: 1.0,
        sense: Sense::Eq,
    });
    Ok(prog)
}

/// Per-user bound `(Σ_n |c_ii,n| + |d_ii|)² / (α_i σ_i²)` on the relaxation,
/// valid because `|V_mn| ≤ 1` for any feasible `V`. Minimized over users.
pub fn relaxation_bound(data: &QuadraticData, config: &SystemConfig) -> f64 {
    (0..data.k())
        .map(|i| {
            let l1: f64 = data.c[i][i].iter().map(|z| z.norm()).sum::<f64>() + data.d[i][i].norm();
            l1 * l1 / (config.weight()[i] * config.noise_power()[i])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Bisection over `t` on the PSD feasibility program. `start` (if any) seeds
/// the lower bracket with its own rank-one lift.
pub fn solve_p33(
    data: &QuadraticData,
    lifted: &LiftedData,
    config: &SystemConfig,
    start: Option<&ReflectVector>,
    opts: &SdrOptions,
) -> Result<(CMatrix, f64, f64, usize)> {
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bisection tolerance must be positive, got {}", opts.rel_tol)));
    }
    let dim = lifted.dim();
    let (mut best_v, mut lo) = match start {
        Some(v) if v.max_modulus() <= 1.0 + 1e-12 && v.len() + 1 == dim => {
            let vbar = augment(&v.0);
            (&vbar * vbar.adjoint(), data.min_weighted_sinr(&v.0, config))
        }
        _ => {
            let mut e = CMatrix::zeros(dim, dim);
            e[(dim - 1, dim - 1)] = C64::new(1.0, 0.0);
            let t0 = lifted_min_sinr(lifted, &e, config);
            (e, t0)
        }
    };
    let mut hi = relaxation_bound(data, config).max(lo);
    let solver = InteriorPoint {
        stop_at_first_feasible: true,
        ..Default::default()
    };
    let mut iters = 0;
    while hi - lo > opts.rel_tol * hi && iters < opts.max_bisections {
        iters += 1;
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let prog = build_p34(mid, lifted, config)?;
        let out = solver.psd_feasibility(&prog, opts.solver_tol)?;
        match out.status {
            SolverStatus::Feasible | SolverStatus::Optimal => {
                best_v = out.point.expect("feasible outcome carries a point");
                lo = mid;
            }
            SolverStatus::Infeasible => hi = mid,
            SolverStatus::NumericalFailure => {
                return Err(Error::Bisection {
                    t: mid,
                    lo,
                    hi,
                    reason: format!("PSD solver failed (residual {:.3e})", out.certificate_gap),
                })
            }
        }
    }
    Ok((best_v, lo, hi, iters))
}

fn unit_phase_map(vbar: &CVector) -> ReflectVector {
    let n = vbar.len() - 1;
    let anchor = vbar[n];
    ReflectVector(CVector::from_fn(n, |j, _| {
        let z = if anchor.norm() > 0.0 { vbar[j] / anchor } else { vbar[j] };
        C64::from_polar(1.0, z.arg())
    }))
}

/// Gaussian randomization: samples `ṽ = U Σ^{1/2} r`, maps each to unit
/// modulus relative to its last entry, keeps the best min weighted SINR.
/// Returns the candidate, its value and whether the rank-one shortcut fired.
pub fn randomize(
    v_star: &CMatrix,
    data: &QuadraticData,
    config: &SystemConfig,
    count: usize,
    seed: u64,
) -> Result<(ReflectVector, f64, bool)> {
    if count == 0 {
        return Err(Error::InvalidArgument("randomization count must be at least 1".into()));
    }
    let dim = v_star.nrows();
    let (eig, vecs) = hermitian_eigen(v_star);
    let top = eig[0].max(0.0);
    if dim == 1 || eig[1].max(0.0) <= 1e-6 * top {
        let v = unit_phase_map(&vecs.column(0).into_owned());
        let value = data.min_weighted_sinr(&v.0, config);
        return Ok((v, value, true));
    }
    let scaled = CMatrix::from_fn(dim, dim, |r, c| vecs[(r, c)] * eig[c].max(0.0).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x5d2);
    let mut best: Option<(ReflectVector, f64)> = None;
    for _ in 0..count {
        let r = CVector::from_fn(dim, |_, _| {
            let (u1, u2): (f64, f64) = (1.0 - rng.gen::<f64>(), rng.gen());
            C64::from_polar((-u1.ln()).sqrt(), std::f64::consts::TAU * u2)
        });
        let cand = unit_phase_map(&(&scaled * r));
        let value = data.min_weighted_sinr(&cand.0, config);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((cand, value));
        }
    }
    let (v, value) = best.expect("count >= 1");
    Ok((v, value, false))
}

/// Full SDR step: lift, bisect, randomize. If the recovered vector beats the
/// bisection's lower end, its own lift is a feasible point at that larger
/// target, and the relaxation value is raised to match.
pub fn sdr_update(
    data: &QuadraticData,
    config: &SystemConfig,
    start: Option<&ReflectVector>,
    opts: &SdrOptions,
) -> Result<SdrResult> {
    if data.n() == 0 {
        let value = data.min_weighted_sinr(&CVector::zeros(0), config);
        return Ok(SdrResult {
            v_star: CMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            t_relaxed: value,
            t_upper: value,
            v_candidate: ReflectVector::zeros(0),
            achieved_min_sinr: value,
            rank_one_exact: true,
            bisection_iters: 0,
        });
    }
    let lifted = lift(data);
    let (mut v_star, mut t_relaxed, t_upper, iters) = solve_p33(data, &lifted, config, start, opts)?;
    let (v, achieved, rank_one) = randomize(&v_star, data, config, opts.randomization_count, opts.seed)?;
    if achieved > t_relaxed {
        let vbar = augment(&v.0);
        v_star = &vbar * vbar.adjoint();
        t_relaxed = achieved;
    }
    Ok(SdrResult {
        v_star,
        t_relaxed,
        t_upper: t_upper.max(t_relaxed),
        v_candidate: v,
        achieved_min_sinr: achieved,
        rank_one_exact: rank_one,
        bisection_iters: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::solve_psd_feasibility;
    use crate::linalg::hermitian_defect;
    use crate::model::quadratic_data;
    use crate::model::testutil::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Single-user data with explicit `c` and `d`.
    fn single(cvals: &[C64], d: C64) -> QuadraticData {
        let cv = CVector::from_column_slice(cvals);
        QuadraticData {
            big_c: vec![vec![&cv * cv.adjoint()]],
            u: vec![vec![&cv * d.conj()]],
            c: vec![vec![cv]],
            d: vec![vec![d]],
        }
    }

    fn grid_best(data: &QuadraticData, config: &SystemConfig) -> f64 {
        let mut best = 0.0f64;
        for a in 0..360 {
            for b in 0..360 {
                let v = ReflectVector::from_phases(&[(a as f64).to_radians(), (b as f64).to_radians()]);
                best = best.max(data.min_weighted_sinr(&v.0, config));
            }
        }
        best
    }

    #[test]
    fn lift_examples() {
        let l = lift(&single(&[c(1.0, 0.0)], c(1.0, 0.0)));
        let expect = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(l.r[0][0], expect);
        let z = lift(&single(&[c(0.0, 0.0), c(0.0, 0.0)], c(2.0, 1.0)));
        assert!(z.r[0][0].iter().all(|x| *x == c(0.0, 0.0)));
        assert_eq!(z.d_abs2[0][0], 5.0);
    }

    #[test]
    fn lift_matches_quadratic_forms() {
        let cfg = SystemConfig::uniform(2, 2, 3, 1.0, 0.1).unwrap();
        let mut r = rng(4);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let w = random_beams(&mut r, &cfg);
        let data = quadratic_data(&ch, &w, &cfg).unwrap();
        let l = lift(&data);
        for row in &l.r {
            for m in row {
                assert!(hermitian_defect(m) <= 1e-12);
                assert_eq!(m[(3, 3)], c(0.0, 0.0));
            }
        }
        for _ in 0..100 {
            let v = random_reflect(&mut r, 3);
            for i in 0..2 {
                for k in 0..2 {
                    let lhs = lifted_form(&l, &v.0, i, k) + l.d_abs2[i][k];
                    let rhs = data.pair_power(&v.0, i, k);
                    assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn p34_counts_and_zero_target() {
        let cfg = SystemConfig::uniform(3, 2, 4, 1.0, 0.1).unwrap();
        let mut r = rng(5);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let data = quadratic_data(&ch, &random_beams(&mut r, &cfg), &cfg).unwrap();
        let l = lift(&data);
        let p = build_p34(0.0, &l, &cfg).unwrap();
        assert_eq!(p.trace.len(), 3);
        assert_eq!(p.entries.len(), 5);
        assert!(p.violation(&CMatrix::identity(5, 5)) <= 1e-12);
        assert!(solve_psd_feasibility(&p, 1e-8).unwrap().is_feasible());
        assert!(build_p34(-1.0, &l, &cfg).is_err());
    }

    #[test]
    fn single_reflector_closed_form() {
        let cfg = SystemConfig::uniform(1, 1, 1, 1.0, 0.2).unwrap();
        let data = single(&[c(0.3, -0.4)], c(-0.2, 0.1));
        let closed = (0.5 + 0.05f64.sqrt()).powi(2) / 0.2;
        let (_, t, _, _) = solve_p33(&data, &lift(&data), &cfg, None, &SdrOptions::default()).unwrap();
        assert!((t - closed).abs() <= 0.01 * closed, "{t} vs {closed}");
    }

    #[test]
    fn two_reflector_grid_and_bisection_postcondition() {
        let cfg = SystemConfig::uniform(1, 1, 2, 1.0, 0.1).unwrap();
        let mut r = rng(6);
        for _ in 0..3 {
            let data = single(
                &[c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)), c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))],
                c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)),
            );
            let grid = grid_best(&data, &cfg);
            let lifted = lift(&data);
            let (_, t, hi, _) = solve_p33(&data, &lifted, &cfg, None, &SdrOptions::default()).unwrap();
            assert!((t - grid).abs() <= 0.01 * grid, "{t} vs {grid}");
            assert!(hi - t <= 1e-4 * hi);
            let above = build_p34(t + 10.0 * 1e-4 * hi, &lifted, &cfg).unwrap();
            assert_eq!(solve_psd_feasibility(&above, 1e-8).unwrap().status, SolverStatus::Infeasible);
            let at = build_p34(t, &lifted, &cfg).unwrap();
            assert!(solve_psd_feasibility(&at, 1e-8).unwrap().is_feasible());

            let (v, val, _) = {
                let (vs, _, _, _) = solve_p33(&data, &lifted, &cfg, None, &SdrOptions::default()).unwrap();
                randomize(&vs, &data, &cfg, 500, 1).unwrap()
            };
            assert!(v.0.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
            assert!(val >= 0.97 * grid, "{val} vs {grid}");
        }
    }

    #[test]
    fn rank_one_bypass_recovers_vector() {
        let cfg = SystemConfig::uniform(1, 1, 3, 1.0, 0.1).unwrap();
        let data = single(&[c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)], c(1.0, 0.0));
        let phases = [0.3, -1.2, 2.5];
        let anchor = C64::from_polar(1.0, 0.7);
        let mut vbar = CVector::zeros(4);
        for (j, p) in phases.iter().enumerate() {
            vbar[j] = C64::from_polar(1.0, *p) * anchor;
        }
        vbar[3] = anchor;
        let vs = &vbar * vbar.adjoint();
        let (v, _, exact) = randomize(&vs, &data, &cfg, 10, 0).unwrap();
        assert!(exact);
        for (j, p) in phases.iter().enumerate() {
            assert!((v.0[j] - C64::from_polar(1.0, *p)).norm() <= 1e-10);
        }
        assert!(randomize(&vs, &data, &cfg, 0, 0).is_err());
    }

    #[test]
    fn sdr_update_closed_form_and_dominance() {
        let cfg = SystemConfig::uniform(1, 1, 2, 1.0, 0.1).unwrap();
        let data = single(&[c(0.6, 0.2), c(-0.1, 0.7)], c(0.3, -0.3));
        let closed = (data.c[0][0].iter().map(|z| z.norm()).sum::<f64>() + data.d[0][0].norm()).powi(2) / 0.1;
        let res = sdr_update(&data, &cfg, None, &SdrOptions::default()).unwrap();
        assert!((res.achieved_min_sinr - closed).abs() <= 0.03 * closed);
        assert!(res.achieved_min_sinr <= res.t_relaxed);
        assert!((data.min_weighted_sinr(&res.v_candidate.0, &cfg) - res.achieved_min_sinr).abs() < 1e-12);
        let last = res.v_star.nrows() - 1;
        assert!((res.v_star[(last, last)].re - 1.0).abs() <= 1e-8);
        for j in 0..last {
            assert!(res.v_star[(j, j)].re <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn relaxation_dominates_random_phases() {
        let cfg = SystemConfig::uniform(2, 2, 4, 1.0, 0.05).unwrap();
        let mut r = rng(21);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let data = quadratic_data(&ch, &random_beams(&mut r, &cfg), &cfg).unwrap();
        let res = sdr_update(&data, &cfg, None, &SdrOptions::default()).unwrap();
        for _ in 0..200 {
            let phases: Vec<f64> = (0..4).map(|_| r.gen_range(0.0..std::f64::consts::TAU)).collect();
            let v = ReflectVector::from_phases(&phases);
            assert!(data.min_weighted_sinr(&v.0, &cfg) <= res.t_upper);
        }
        assert!(res.t_relaxed <= res.t_upper);
    }

    #[test]
    fn no_reflectors_passthrough() {
        let cfg = SystemConfig::uniform(2, 2, 0, 1.0, 0.1).unwrap();
        let mut r = rng(2);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let data = quadratic_data(&ch, &random_beams(&mut r, &cfg), &cfg).unwrap();
        let res = sdr_update(&data, &cfg, None, &SdrOptions::default()).unwrap();
        assert!(res.v_candidate.is_empty());
        assert_eq!(res.achieved_min_sinr, data.min_weighted_sinr(&CVector::zeros(0), &cfg));
    }
}
