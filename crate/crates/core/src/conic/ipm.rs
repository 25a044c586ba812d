//! Primal-dual path-following interior-point method for
//!
//! ```text
//!   minimize    cᵀx
//!   subject to  G x + s = h,  A x = b,  s ∈ K
//! ```
//!
//! with dual `maximize −hᵀz − bᵀy  s.t.  Gᵀz + Aᵀy + c = 0, z ∈ K`.
//! Nesterov–Todd scaling, Mehrotra predictor-corrector, infeasible start.
//! The method assumes both problems are strictly feasible; callers pose
//! phase-I programs that satisfy this by construction.

use super::cones::{self, ConeDims, Op, Scaling};
use crate::linalg::{RMatrix, RVector};
use nalgebra::LU;
use nalgebra::Dyn;
use std::io::{self, Write};

#[derive(Debug, Clone)]
pub struct ConeProgram {
    pub c: RVector,
    pub g: RMatrix,
    pub h: RVector,
    pub a: RMatrix,
    pub b: RVector,
    pub dims: ConeDims,
}

impl ConeProgram {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        let n = self.c.len();
        let m = self.dims.total();
        if self.g.nrows() != m || self.g.ncols() != n || self.h.len() != m {
            return Err(format!(
                "G is {}x{}, h has {} rows, cones need {m} rows and {n} columns",
                self.g.nrows(),
                self.g.ncols(),
                self.h.len()
            ));
        }
        if self.a.ncols() != n || self.a.nrows() != self.b.len() {
            return Err(format!(
                "A is {}x{}, b has {} rows, expected {n} columns",
                self.a.nrows(),
                self.a.ncols(),
                self.b.len()
            ));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !(finite(self.c.as_slice())
            && finite(self.g.as_slice())
            && finite(self.h.as_slice())
            && finite(self.a.as_slice())
            && finite(self.b.as_slice()))
        {
            return Err("program data contains non-finite values".into());
        }
        Ok(())
    }

    /// Plain-text dump for triage: a header line with the cone layout followed
    /// by one `name rows cols` line and whitespace-separated rows per array.
    pub fn dump(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(
            out,
            "cone_program nonneg={} soc={:?} psd={:?}",
            self.dims.nonneg, self.dims.soc, self.dims.psd
        )?;
        let mut mat = |name: &str, m: &RMatrix| -> io::Result<()> {
            writeln!(out, "{name} {} {}", m.nrows(), m.ncols())?;
            for row in m.row_iter() {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
                writeln!(out, "{}", cells.join(" "))?;
            }
            Ok(())
        };
        mat("c", &RMatrix::from_column_slice(self.c.len(), 1, self.c.as_slice()))?;
        mat("G", &self.g)?;
        mat("h", &RMatrix::from_column_slice(self.h.len(), 1, self.h.as_slice()))?;
        mat("A", &self.a)?;
        mat("b", &RMatrix::from_column_slice(self.b.len(), 1, self.b.as_slice()))
    }
}

#[derive(Debug, Clone)]
pub struct IpmSettings {
    pub max_iter: usize,
    pub feas_tol: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    /// Stop once the primal residual is small and `cᵀx` drops below this.
    pub stop_pobj_below: Option<f64>,
    /// Stop once the dual residual is small and the dual objective exceeds this.
    pub stop_dobj_above: Option<f64>,
    pub step_fraction: f64,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            feas_tol: 1e-10,
            abs_gap: 1e-10,
            rel_gap: 1e-10,
            stop_pobj_below: None,
            stop_dobj_above: None,
            step_fraction: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    PrimalTarget,
    DualTarget,
    MaxIterations,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct IpmSolution {
    pub status: IpmStatus,
    pub x: RVector,
    pub y: RVector,
    pub s: RVector,
    pub z: RVector,
    pub pobj: f64,
    pub dobj: f64,
    pub pres: f64,
    pub dres: f64,
    pub gap: f64,
    pub iterations: usize,
}

struct Residuals {
    rx: RVector,
    ry: RVector,
    rz: RVector,
    pres: f64,
    dres: f64,
}

/// Factorization of the reduced KKT system `[[ĜᵀĜ, Aᵀ], [A, 0]]` for one scaling.
struct Kkt<'a> {
    prog: &'a ConeProgram,
    g_hat: RMatrix,
    lu: LU<f64, Dyn, Dyn>,
    kmat: RMatrix,
}

impl<'a> Kkt<'a> {
    fn factor(prog: &'a ConeProgram, g_hat: RMatrix) -> Option<Self> {
        let n = prog.num_vars();
        let p = prog.b.len();
        let mut kmat = RMatrix::zeros(n + p, n + p);
        let h = g_hat.tr_mul(&g_hat);
        kmat.view_mut((0, 0), (n, n)).copy_from(&h);
        kmat.view_mut((n, 0), (p, n)).copy_from(&prog.a);
        kmat.view_mut((0, n), (n, p)).copy_from(&prog.a.transpose());
        let diag_max = (0..n).map(|i| h[(i, i)].abs()).fold(1.0, f64::max);
        let delta = 1e-14 * diag_max;
        let mut reg = kmat.clone();
        for i in 0..n {
            reg[(i, i)] += delta;
        }
        for i in n..n + p {
            reg[(i, i)] -= delta;
        }
        let lu = reg.lu();
        if !lu.is_invertible() {
            return None;
        }
        Some(Self {
            prog,
            g_hat,
            lu,
            kmat,
        })
    }

    fn solve_reduced(&self, rhs: &RVector) -> Option<RVector> {
        let mut sol = self.lu.solve(rhs)?;
        for _ in 0..3 {
            let res = rhs - &self.kmat * &sol;
            if res.norm() <= 1e-15 * rhs.norm().max(1e-300) {
                break;
            }
            sol += self.lu.solve(&res)?;
        }
        Some(sol)
    }

    /// Solves `[[0, Aᵀ, Gᵀ], [A, 0, 0], [G, 0, −WᵀW]] (dx, dy, dz) = (bx, by, bz)`
    /// given `W⁻ᵀ bz`, returning `(dx, dy, W dz)`.
    fn solve(&self, bx: &RVector, by: &RVector, wit_bz: &RVector) -> Option<(RVector, RVector, RVector)> {
        let n = self.prog.num_vars();
        let p = self.prog.b.len();
        let mut rhs = RVector::zeros(n + p);
        rhs.rows_mut(0, n).copy_from(&(bx + self.g_hat.tr_mul(wit_bz)));
        rhs.rows_mut(n, p).copy_from(by);
        let sol = self.solve_reduced(&rhs)?;
        let dx = sol.rows(0, n).into_owned();
        let dy = sol.rows(n, p).into_owned();
        let dz_scaled = &self.g_hat * &dx - wit_bz;
        Some((dx, dy, dz_scaled))
    }
}

fn residuals(prog: &ConeProgram, x: &RVector, y: &RVector, s: &RVector, z: &RVector) -> Residuals {
    let rx = prog.g.tr_mul(z) + prog.a.tr_mul(y) + &prog.c;
    let ry = &prog.a * x - &prog.b;
    let rz = &prog.g * x + s - &prog.h;
    let pres = (ry.norm() / prog.b.norm().max(1.0)).max(rz.norm() / prog.h.norm().max(1.0));
    let dres = rx.norm() / prog.c.norm().max(1.0);
    Residuals {
        rx,
        ry,
        rz,
        pres,
        dres,
    }
}

/// Shifts `x` into the interior: `x + (1 + t) e` when `x` is not already well inside.
fn push_interior(dims: &ConeDims, x: &RVector) -> RVector {
    let t = -cones::min_eigenvalue(dims, x);
    if t >= -1e-8 * x.norm().max(1.0) {
        x + cones::identity(dims) * (1.0 + t)
    } else {
        x.clone()
    }
}

pub fn solve(prog: &ConeProgram, settings: &IpmSettings) -> Result<IpmSolution, String> {
    prog.check()?;
    let dims = &prog.dims;
    let n = prog.num_vars();
    let m = dims.total();
    let nu = dims.degree().max(1) as f64;

    // Starting point from the identity-scaled KKT system.
    let kkt0 = Kkt::factor(prog, prog.g.clone()).ok_or("initial KKT system is singular")?;
    let (x0, y0, z0) = kkt0
        .solve(&(-&prog.c), &prog.b, &prog.h)
        .ok_or("initial KKT solve failed")?;
    let mut x = x0;
    let mut y = y0;
    let mut s = push_interior(dims, &(-&z0));
    let mut z = push_interior(dims, &z0);

    let mut stalls = 0;
    let mut last = None;
    for iter in 0..=settings.max_iter {
        let r = residuals(prog, &x, &y, &s, &z);
        let pobj = prog.c.dot(&x);
        let dobj = -prog.h.dot(&z) - prog.b.dot(&y);
        let gap = s.dot(&z);
        let snapshot = |status| IpmSolution {
            status,
            x: x.clone(),
            y: y.clone(),
            s: s.clone(),
            z: z.clone(),
            pobj,
            dobj,
            pres: r.pres,
            dres: r.dres,
            gap,
            iterations: iter,
        };
        if !(pobj.is_finite() && dobj.is_finite() && gap.is_finite()) {
            return Ok(last.unwrap_or_else(|| snapshot(IpmStatus::NumericalFailure)));
        }
        if let Some(target) = settings.stop_pobj_below {
            if r.pres <= settings.feas_tol && pobj < target {
                return Ok(snapshot(IpmStatus::PrimalTarget));
            }
        }
        if let Some(target) = settings.stop_dobj_above {
            if r.dres <= settings.feas_tol && dobj > target {
                return Ok(snapshot(IpmStatus::DualTarget));
            }
        }
        let rel_gap = if pobj < 0.0 {
            gap / -pobj
        } else if dobj > 0.0 {
            gap / dobj
        } else {
            f64::INFINITY
        };
        if r.pres <= settings.feas_tol
            && r.dres <= settings.feas_tol
            && (gap <= settings.abs_gap || rel_gap <= settings.rel_gap)
        {
            return Ok(snapshot(IpmStatus::Optimal));
        }
        if iter == settings.max_iter {
            return Ok(snapshot(IpmStatus::MaxIterations));
        }

        let Some(w) = Scaling::compute(dims, &s, &z) else {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        };
        let lambda = w.lambda.clone();
        let g_hat = w.apply_columns(Op::WInvT, &prog.g);
        let Some(kkt) = Kkt::factor(prog, g_hat) else {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        };
        let mu = gap / nu;
        let wit_rz = w.apply(Op::WInvT, &r.rz);
        let bx = -&r.rx;
        let by = -&r.ry;
        let lambda_sq = cones::jordan_product(dims, &lambda, &lambda);

        // Newton direction for complementarity target `rc` (scaled space).
        let direction = |rc: &RVector| -> Option<(RVector, RVector, RVector, RVector)> {
            let lam_div = cones::jordan_divide(dims, &lambda, rc);
            let wit_bz = -&wit_rz - &lam_div;
            let (dx, dy, dz_s) = kkt.solve(&bx, &by, &wit_bz)?;
            let ds_s = &lam_div - &dz_s;
            Some((dx, dy, ds_s, dz_s))
        };

        // predictor
        let Some((_, _, ds_a, dz_a)) = direction(&(-&lambda_sq)) else {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        };
        let alpha_aff = cones::max_step(dims, &lambda, &ds_a)
            .min(cones::max_step(dims, &lambda, &dz_a))
            .min(1.0);
        let gap_aff = (&lambda + &ds_a * alpha_aff).dot(&(&lambda + &dz_a * alpha_aff));
        let sigma = (gap_aff / gap).clamp(0.0, 1.0).powi(3);

        // corrector
        let rc = -&lambda_sq - cones::jordan_product(dims, &ds_a, &dz_a)
            + cones::identity(dims) * (sigma * mu);
        let Some((dx, dy, ds_s, dz_s)) = direction(&rc) else {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        };
        let alpha_max = cones::max_step(dims, &lambda, &ds_s).min(cones::max_step(dims, &lambda, &dz_s));
        let alpha = (settings.step_fraction * alpha_max).min(1.0);
        if !(alpha.is_finite() && alpha > 0.0) {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        }
        stalls = if alpha < 1e-8 { stalls + 1 } else { 0 };
        if stalls >= 5 {
            return Ok(snapshot(IpmStatus::NumericalFailure));
        }

        let ds = w.apply(Op::WT, &ds_s);
        let dz = w.apply(Op::WInv, &dz_s);
        last = Some(snapshot(IpmStatus::NumericalFailure));
        x += dx * alpha;
        y += dy * alpha;
        s += ds * alpha;
        z += dz * alpha;
        debug_assert_eq!(s.len(), m);
        debug_assert_eq!(x.len(), n);
    }
    unreachable!("loop returns on the final iteration")
}
