//! Reflect-vector update by successive convex approximation.
//!
//! For a target `t`, user `i` meets it iff `F_i(v) ≤ 0` where
//! `F_i = α_i t (interference_i(v) + σ_i²) − signal_i(v)`. The signal term is
//! convex in `v`, so replacing it by its tangent at the current point gives a
//! convex majorant `F_i^up`; minimizing `max_i F_i^up` over `|v_n| ≤ 1` never
//! lowers the min weighted SINR.

use crate::conic::{ConicSolver, InteriorPoint, QcqpMinProgram, QuadConstraint, SolverStatus, DEFAULT_TOL};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::model::{QuadraticData, ReflectVector, SystemConfig};

#[derive(Debug, Clone)]
pub struct ScaStep {
    pub v_new: ReflectVector,
    /// Optimum of the convex subproblem, in units of the common scale
    /// `max_i σ_i² (1 + α_i t)`. Never positive for a correct solve.
    pub z_star: f64,
    pub t_before: f64,
    pub t_after: f64,
    /// The subproblem's point did not improve on the expansion point, which was kept.
    pub kept_previous: bool,
}

fn check_inputs(v: &ReflectVector, data: &QuadraticData, t: f64, config: &SystemConfig) -> Result<()> {
    check_dim("reflect vector", data.n(), v.len())?;
    check_dim("users", config.k(), data.k())?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("target SINR must be non-negative, got {t}")));
    }
    Ok(())
}

pub fn f_aux(v: &ReflectVector, data: &QuadraticData, t: f64, config: &SystemConfig) -> Result<Vec<f64>> {
    check_inputs(v, data, t, config)?;
    Ok((0..data.k())
        .map(|i| {
            let at = config.weight()[i] * t;
            at * (data.interference(&v.0, i) + config.noise_power()[i]) - data.signal(&v.0, i)
        })
        .collect())
}

/// Gradient helper: `C_ii v_local + u_ii`.
fn tangent(data: &QuadraticData, v_local: &CVector, i: usize) -> CVector {
    &data.big_c[i][i] * v_local + &data.u[i][i]
}

/// `F_i` with the signal replaced by `signal(v_local) + 2 Re{(C_ii v_local + u_ii)ᴴ (v − v_local)}`.
pub fn f_upper(
    v: &ReflectVector,
    v_local: &ReflectVector,
    data: &QuadraticData,
    t: f64,
    config: &SystemConfig,
) -> Result<Vec<f64>> {
    check_inputs(v, data, t, config)?;
    check_dim("expansion point", data.n(), v_local.len())?;
    Ok((0..data.k())
        .map(|i| {
            let at = config.weight()[i] * t;
            let g = tangent(data, &v_local.0, i);
            let linear = data.signal(&v_local.0, i) + 2.0 * g.dotc(&(&v.0 - &v_local.0)).re;
            at * (data.interference(&v.0, i) + config.noise_power()[i]) - linear
        })
        .collect())
}

/// Common positive scale applied to every `F_i^up` before solving.
fn common_scale(t: f64, config: &SystemConfig) -> f64 {
    (0..config.k())
        .map(|i| config.noise_power()[i] * (1.0 + config.weight()[i] * t))
        .fold(0.0, f64::max)
}

/// The convex subproblem: minimize `z` s.t. `F_i^up(v)/s ≤ z`, `|v_n| ≤ 1`.
/// Interference quadratics use the rank-one factors `√(α_i t / s) · c_ikᴴ`.
pub fn build_p41(v_local: &ReflectVector, data: &QuadraticData, t: f64, config: &SystemConfig) -> Result<QcqpMinProgram> {
    check_inputs(v_local, data, t, config)?;
    let (k, n) = (data.k(), data.n());
    let s = common_scale(t, config);
    let mut prog = QcqpMinProgram::new(n);
    for i in 0..k {
        let at = config.weight()[i] * t;
        let g = tangent(data, &v_local.0, i);
        let others: Vec<usize> = (0..k).filter(|&kk| kk != i).collect();
        let rows = if at > 0.0 { others.len() } else { 0 };
        let root = (at / s).sqrt();
        let factor = CMatrix::from_fn(rows, n, |r, col| data.c[i][others[r]][col].conj() * root);
        let mut q = -&g;
        let mut r = at * config.noise_power()[i] - data.signal(&v_local.0, i) + 2.0 * g.dotc(&v_local.0).re;
        for &kk in &others {
            q += &data.u[i][kk] * C64::new(at, 0.0);
            r += at * data.d[i][kk].norm_sqr();
        }
        prog.quad.push(QuadConstraint {
            factor,
            q: q / C64::new(s, 0.0),
            r: r / s,
        });
    }
    prog.modulus = (0..n).map(|j| (j, 1.0)).collect();
    Ok(prog)
}

/// One SCA step from `v_local`, where `t_current` is the min weighted SINR at
/// `v_local` under the beamformers behind `data`.
pub fn sca_update(
    v_local: &ReflectVector,
    data: &QuadraticData,
    t_current: f64,
    config: &SystemConfig,
) -> Result<ScaStep> {
    check_inputs(v_local, data, t_current, config)?;
    if v_local.max_modulus() > 1.0 + 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "expansion point violates the modulus bound ({:.3e})",
            v_local.max_modulus()
        )));
    }
    let before = data.min_weighted_sinr(&v_local.0, config);
    let keep = |z_star: f64| ScaStep {
        v_new: v_local.clone(),
        z_star,
        t_before: before,
        t_after: before,
        kept_previous: true,
    };
    if data.n() == 0 {
        return Ok(keep(0.0));
    }
    let prog = build_p41(v_local, data, t_current, config)?;
    let out = InteriorPoint::default().qcqp_min(&prog, DEFAULT_TOL)?;
    let pt = match (out.status, out.point) {
        (SolverStatus::Optimal, Some(pt)) => pt,
        (status, _) => {
            return Err(Error::Solver(format!(
                "SCA subproblem ended with {status:?} (gap {:.3e})",
                out.certificate_gap
            )))
        }
    };
    // the expansion point is feasible with z = max_i F_i(v_local)/s, so a correct
    // solve cannot end above it
    let z_local = prog.objective_at(&v_local.0);
    let slack = 1e-6 * (1.0 + z_local.abs());
    if pt.z > z_local.max(0.0) + slack {
        return Err(Error::Contract(format!(
            "SCA subproblem optimum {:.6e} above the expansion point's {:.6e}",
            pt.z, z_local
        )));
    }
    let v_new = ReflectVector(pt.x);
    let after = data.min_weighted_sinr(&v_new.0, config);
    if after < before {
        return Ok(keep(pt.z));
    }
    Ok(ScaStep {
        v_new,
        z_star: pt.z,
        t_before: before,
        t_after: after,
        kept_previous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::*;
    use crate::model::{quadratic_data, sinr};
    use crate::txbf::{solve_p2, TxbfOptions};
    use rand::Rng;

    fn random_setup(seed: u64, k: usize, n: usize) -> (SystemConfig, QuadraticData, crate::model::ChannelSet, crate::model::TransmitBeamformers) {
        let cfg = SystemConfig::uniform(k, 2, n, 1.0, 0.05).unwrap();
        let mut r = rng(seed);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let w = random_beams(&mut r, &cfg);
        let data = quadratic_data(&ch, &w, &cfg).unwrap();
        (cfg, data, ch, w)
    }

    #[test]
    fn zero_data_leaves_noise_term() {
        let cfg = SystemConfig::new(2, 1, 2, vec![1.0; 2], vec![0.5, 2.0], vec![0.1, 0.3]).unwrap();
        let z = CVector::zeros(2);
        let data = QuadraticData {
            c: vec![vec![z.clone(); 2]; 2],
            d: vec![vec![C64::new(0.0, 0.0); 2]; 2],
            big_c: vec![vec![CMatrix::zeros(2, 2); 2]; 2],
            u: vec![vec![z; 2]; 2],
        };
        let f = f_aux(&ReflectVector::from_phases(&[0.1, 0.2]), &data, 3.0, &cfg).unwrap();
        assert!((f[0] - 0.5 * 3.0 * 0.1).abs() < 1e-15);
        assert!((f[1] - 2.0 * 3.0 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn tight_at_p2_target() {
        let cfg = SystemConfig::uniform(3, 2, 4, 1.0, 0.05).unwrap();
        let mut r = rng(2);
        let ch = random_channels(&mut r, &cfg, 1.0);
        let v = random_reflect(&mut r, 4);
        let res = solve_p2(&ch, &v, &cfg, &TxbfOptions::default()).unwrap();
        let data = quadratic_data(&ch, &res.w, &cfg).unwrap();
        let f = f_aux(&v, &data, res.t_star, &cfg).unwrap();
        let worst = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = common_scale(res.t_star, &cfg);
        assert!(worst.abs() <= 1e-8 * scale, "max F = {worst}");
        assert!(f.iter().all(|x| *x <= 1e-8 * scale));
    }

    #[test]
    fn sign_matches_sinr_threshold() {
        let mut r = rng(3);
        for s in 0..100 {
            let (cfg, data, ch, w) = random_setup(s, 3, 3);
            let v = random_reflect(&mut r, 3);
            let gamma = sinr(&v, &w, &ch, &cfg).unwrap();
            let t = r.gen_range(0.0..2.0) * gamma.iter().cloned().fold(0.0, f64::max);
            let f = f_aux(&v, &data, t, &cfg).unwrap();
            for i in 0..3 {
                if (gamma[i] - t).abs() > 1e-9 * t {
                    assert_eq!(f[i] < 0.0, gamma[i] > t);
                }
            }
        }
    }

    #[test]
    fn majorant_properties() {
        let mut r = rng(4);
        for s in 0..200 {
            let (cfg, data, _, _) = random_setup(1000 + s, 2, 3);
            let v = random_reflect(&mut r, 3);
            let vl = random_reflect(&mut r, 3);
            let t = r.gen_range(0.0..5.0);
            let up = f_upper(&v, &vl, &data, t, &cfg).unwrap();
            let exact = f_aux(&v, &data, t, &cfg).unwrap();
            let at_local = f_upper(&vl, &vl, &data, t, &cfg).unwrap();
            let exact_local = f_aux(&vl, &data, t, &cfg).unwrap();
            for i in 0..2 {
                assert!(up[i] >= exact[i] - 1e-9);
                assert!((at_local[i] - exact_local[i]).abs() <= 1e-10);
            }
            // directional derivative of the signal at vl vs. central differences
            let dir = cvec(&mut r, 3, 1.0);
            let h = 1e-5;
            let plus = &vl.0 + &dir * C64::new(h, 0.0);
            let minus = &vl.0 - &dir * C64::new(h, 0.0);
            for i in 0..2 {
                let fd = (data.signal(&plus, i) - data.signal(&minus, i)) / (2.0 * h);
                let lin = 2.0 * tangent(&data, &vl.0, i).dotc(&dir).re;
                assert!((fd - lin).abs() <= 1e-5 * lin.abs().max(1e-3), "{fd} vs {lin}");
            }
        }
    }

    #[test]
    fn subproblem_matches_majorant() {
        let (cfg, data, _, _) = random_setup(8, 3, 4);
        let mut r = rng(9);
        let vl = random_reflect(&mut r, 4);
        let t = 0.7;
        let prog = build_p41(&vl, &data, t, &cfg).unwrap();
        let s = common_scale(t, &cfg);
        for _ in 0..20 {
            let v = random_reflect(&mut r, 4);
            let up = f_upper(&v, &vl, &data, t, &cfg).unwrap();
            for i in 0..3 {
                assert!((prog.quad[i].value(&v.0) * s - up[i]).abs() <= 1e-12 * up[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn single_user_phase_alignment() {
        let cfg = SystemConfig::uniform(1, 1, 1, 1.0, 0.1).unwrap();
        let c = CVector::from_element(1, C64::new(0.4, 0.3));
        let d = C64::new(0.2, -0.5);
        let data = QuadraticData {
            big_c: vec![vec![&c * c.adjoint()]],
            u: vec![vec![&c * d.conj()]],
            c: vec![vec![c.clone()]],
            d: vec![vec![d]],
        };
        let vl = ReflectVector::from_phases(&[0.0]);
        let t = data.min_weighted_sinr(&vl.0, &cfg);
        let step = sca_update(&vl, &data, t, &cfg).unwrap();
        assert!(step.t_after > step.t_before);
        assert!(step.z_star < 0.0);
        let optimum = (0.5 + d.norm()).powi(2) / 0.1;
        let mut cur = step;
        for _ in 0..60 {
            let next = sca_update(&cur.v_new, &data, cur.t_after, &cfg).unwrap();
            assert!(next.t_after >= cur.t_after);
            cur = next;
        }
        assert!((cur.t_after - optimum).abs() <= 1e-6 * optimum, "{} vs {optimum}", cur.t_after);
        // at the fixed point the subproblem cannot improve
        let again = sca_update(&cur.v_new, &data, cur.t_after, &cfg).unwrap();
        assert!(again.z_star.abs() <= 1e-7);
        assert!((again.t_after - cur.t_after).abs() <= 1e-9 * optimum);
    }

    #[test]
    fn update_never_decreases_and_stays_feasible() {
        let mut r = rng(10);
        for s in 0..10 {
            let (cfg, data, _, _) = random_setup(2000 + s, 3, 5);
            let vl = random_reflect(&mut r, 5);
            let t = data.min_weighted_sinr(&vl.0, &cfg);
            let step = sca_update(&vl, &data, t, &cfg).unwrap();
            assert!(step.t_after >= t - 1e-8 * t);
            assert!(step.z_star <= 1e-8);
            assert!(step.v_new.max_modulus() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn zero_target_uses_linear_terms_only() {
        let (cfg, data, _, _) = random_setup(11, 2, 3);
        let prog = build_p41(&ReflectVector::from_phases(&[0.0; 3]), &data, 0.0, &cfg).unwrap();
        assert!(prog.quad.iter().all(|q| q.factor.nrows() == 0));
        let step = sca_update(&ReflectVector::from_phases(&[0.0; 3]), &data, 0.0, &cfg).unwrap();
        assert!(step.v_new.max_modulus() <= 1.0 + 1e-8);
    }
}
