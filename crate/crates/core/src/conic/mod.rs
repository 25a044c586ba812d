//! Conic feasibility and minimization for the three subproblem shapes used by
//! the beamforming updates. Everything is lifted to real cones and handed to
//! the embedded interior-point method in [`ipm`].

pub mod cones;
pub mod ipm;

use crate::error::{Error, Result};
use crate::linalg::{
    embed_hermitian, extract_hermitian, hermitian_defect, hermitian_eigen, CMatrix, CVector, C64,
    RMatrix, RVector,
};
use cones::ConeDims;
use ipm::{ConeProgram, IpmSettings, IpmStatus};

pub const DEFAULT_TOL: f64 = 1e-8;

/// `‖F x + g‖₂ ≤ cᵀx + b`.
#[derive(Debug, Clone)]
pub struct SocConstraint {
    pub f: RMatrix,
    pub g: RVector,
    pub c: RVector,
    pub b: f64,
}

impl SocConstraint {
    pub fn violation(&self, x: &RVector) -> f64 {
        (&self.f * x + &self.g).norm() - self.c.dot(x) - self.b
    }
}

/// `rowᵀx (= or ≥) rhs`, depending on which list it sits in.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub row: RVector,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SocFeasibilityProgram {
    pub num_vars: usize,
    pub soc: Vec<SocConstraint>,
    pub linear_eq: Vec<LinearConstraint>,
    pub linear_ineq: Vec<LinearConstraint>,
}

impl SocFeasibilityProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        for (j, c) in self.soc.iter().enumerate() {
            if c.f.nrows() == 0 {
                return Err(Error::InvalidArgument(format!("SOC constraint {j} has no rows")));
            }
            if c.f.ncols() != n || c.c.len() != n || c.g.len() != c.f.nrows() {
                return Err(Error::InvalidArgument(format!(
                    "SOC constraint {j}: F is {}x{}, g has {}, c has {}; program has {n} variables",
                    c.f.nrows(),
                    c.f.ncols(),
                    c.g.len(),
                    c.c.len()
                )));
            }
        }
        for (j, l) in self.linear_eq.iter().chain(&self.linear_ineq).enumerate() {
            if l.row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "linear constraint {j} has {} entries, expected {n}",
                    l.row.len()
                )));
            }
        }
        Ok(())
    }

    /// Worst violation of any constraint at `x`, evaluated directly from the program.
    pub fn violation(&self, x: &RVector) -> f64 {
        let soc = self.soc.iter().map(|c| c.violation(x));
        let eq = self.linear_eq.iter().map(|l| (l.row.dot(x) - l.rhs).abs());
        let ineq = self.linear_ineq.iter().map(|l| l.rhs - l.row.dot(x));
        soc.chain(eq).chain(ineq).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Phase-I cone program over `(x, τ)`: every inequality is loosened by `τ`,
    /// `τ ≥ −1`, minimize `τ`.
    pub(crate) fn phase_one(&self) -> ConeProgram {
        let n = self.num_vars;
        let nvar = n + 1;
        let nonneg = self.linear_ineq.len() + 1;
        let soc_dims: Vec<usize> = self.soc.iter().map(|c| c.f.nrows() + 1).collect();
        let rows = nonneg + soc_dims.iter().sum::<usize>();
        let mut g = RMatrix::zeros(rows, nvar);
        let mut h = RVector::zeros(rows);
        for (r, l) in self.linear_ineq.iter().enumerate() {
            for j in 0..n {
                g[(r, j)] = -l.row[j];
            }
            g[(r, n)] = -1.0;
            h[r] = -l.rhs;
        }
        g[(nonneg - 1, n)] = -1.0;
        h[nonneg - 1] = 1.0;
        let mut r = nonneg;
        for c in &self.soc {
            for j in 0..n {
                g[(r, j)] = -c.c[j];
            }
            g[(r, n)] = -1.0;
            h[r] = c.b;
            for i in 0..c.f.nrows() {
                for j in 0..n {
                    g[(r + 1 + i, j)] = -c.f[(i, j)];
                }
                h[r + 1 + i] = c.g[i];
            }
            r += c.f.nrows() + 1;
        }
        let mut a = RMatrix::zeros(self.linear_eq.len(), nvar);
        let mut b = RVector::zeros(self.linear_eq.len());
        for (i, l) in self.linear_eq.iter().enumerate() {
            a.view_mut((i, 0), (1, n)).copy_from(&l.row.transpose());
            b[i] = l.rhs;
        }
        let mut c = RVector::zeros(nvar);
        c[n] = 1.0;
        ConeProgram {
            c,
            g,
            h,
            a,
            b,
            dims: ConeDims {
                nonneg,
                soc: soc_dims,
                psd: vec![],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

impl Sense {
    fn violation(self, value: f64, rhs: f64) -> f64 {
        match self {
            Sense::Ge => rhs - value,
            Sense::Le => value - rhs,
            Sense::Eq => (value - rhs).abs(),
        }
    }
}

/// `Re Tr(H V) (sense) rhs`.
#[derive(Debug, Clone)]
pub struct TraceConstraint {
    pub h: CMatrix,
    pub rhs: f64,
    pub sense: Sense,
}

/// `V[index, index] (sense) bound`.
#[derive(Debug, Clone, Copy)]
pub struct EntryConstraint {
    pub index: usize,
    pub bound: f64,
    pub sense: Sense,
}

/// Find Hermitian `V ⪰ 0` satisfying trace and diagonal-entry constraints.
#[derive(Debug, Clone, Default)]
pub struct PsdFeasibilityProgram {
    pub dim: usize,
    pub trace: Vec<TraceConstraint>,
    pub entries: Vec<EntryConstraint>,
}

fn trace_inner(h: &CMatrix, v: &CMatrix) -> f64 {
    // Re Tr(H V) = Σ_ij Re(H_ij V_ji)
    let mut acc = 0.0;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            acc += (h[(i, j)] * v[(j, i)]).re;
        }
    }
    acc
}

impl PsdFeasibilityProgram {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        for (j, t) in self.trace.iter().enumerate() {
            if t.h.nrows() != n || t.h.ncols() != n {
                return Err(Error::InvalidArgument(format!(
                    "trace constraint {j} is {}x{}, expected {n}x{n}",
                    t.h.nrows(),
                    t.h.ncols()
                )));
            }
            let defect = hermitian_defect(&t.h);
            if !(defect <= 1e-12 * t.h.norm().max(1.0)) {
                return Err(Error::InvalidArgument(format!(
                    "trace constraint {j} is not Hermitian (defect {defect:.3e})"
                )));
            }
            if !t.rhs.is_finite() {
                return Err(Error::InvalidArgument(format!("trace constraint {j} has non-finite rhs")));
            }
        }
        for e in &self.entries {
            if e.index >= n {
                return Err(Error::InvalidArgument(format!(
                    "entry constraint on index {} for a {n}x{n} variable",
                    e.index
                )));
            }
        }
        Ok(())
    }

    /// All constraints as trace constraints, entry constraints included.
    fn all_trace(&self) -> Vec<TraceConstraint> {
        let n = self.dim;
        let mut out = self.trace.clone();
        out.extend(self.entries.iter().map(|e| {
            let mut h = CMatrix::zeros(n, n);
            h[(e.index, e.index)] = C64::new(1.0, 0.0);
            TraceConstraint {
                h,
                rhs: e.bound,
                sense: e.sense,
            }
        }));
        out
    }

    /// Worst violation at `v`, including `−λ_min(V)` and any Hermitian defect.
    pub fn violation(&self, v: &CMatrix) -> f64 {
        if v.nrows() != self.dim || v.ncols() != self.dim {
            return f64::INFINITY;
        }
        let (eig, _) = hermitian_eigen(v);
        let psd = eig.last().map_or(0.0, |l| -l);
        let herm = hermitian_defect(v);
        let traces = self
            .trace
            .iter()
            .map(|t| t.sense.violation(trace_inner(&t.h, v), t.rhs));
        let entries = self
            .entries
            .iter()
            .map(|e| e.sense.violation(v[(e.index, e.index)].re, e.bound));
        traces.chain(entries).fold(psd.max(herm), f64::max)
    }

    /// The phase-I problem posed through its dual. With one cone-program
    /// variable per constraint, the dual variables are `Z = emb(V) ⪰ 0`, one slack
    /// per inequality, and `q = 1 + τ` where `τ` loosens every inequality.
    /// Maximizing `−q` decides feasibility: feasible iff the optimum is `≥ −1`.
    fn phase_one_dual(&self) -> (ConeProgram, usize) {
        let n2 = 2 * self.dim;
        let cons = self.all_trace();
        let m = cons.len();
        let ineq: Vec<usize> = (0..m).filter(|&j| cons[j].sense != Sense::Eq).collect();
        let psd_len = n2 * n2;
        let rows = ineq.len() + 1 + psd_len;
        let mut g = RMatrix::zeros(rows, m);
        let mut h = RVector::zeros(rows);
        let mut c = RVector::zeros(m);
        let q_row = ineq.len();
        h[q_row] = 1.0;
        for (j, con) in cons.iter().enumerate() {
            let sign = if con.sense == Sense::Le { -1.0 } else { 1.0 };
            let emb = embed_hermitian(&con.h);
            for (r, val) in emb.iter().enumerate() {
                g[(q_row + 1 + r, j)] = 0.5 * sign * val;
            }
            if con.sense == Sense::Eq {
                c[j] = -con.rhs;
            } else {
                c[j] = -(sign * con.rhs + 1.0);
                g[(q_row, j)] = 1.0;
            }
        }
        for (p, &j) in ineq.iter().enumerate() {
            g[(p, j)] = -1.0;
        }
        let prog = ConeProgram {
            c,
            g,
            h,
            a: RMatrix::zeros(0, m),
            b: RVector::zeros(0),
            dims: ConeDims {
                nonneg: ineq.len() + 1,
                soc: vec![],
                psd: vec![n2],
            },
        };
        (prog, q_row)
    }
}

/// `xᴴ P x + 2 Re(qᴴ x) + r ≤ z` with `P = BᴴB` stored through its factor `B`.
#[derive(Debug, Clone)]
pub struct QuadConstraint {
    pub factor: CMatrix,
    pub q: CVector,
    pub r: f64,
}

impl QuadConstraint {
    /// Factors a Hermitian PSD `P`; rejects matrices with eigenvalues below
    /// `−1e-10 · max(1, ‖P‖)`.
    pub fn from_hermitian(p: &CMatrix, q: CVector, r: f64) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() != n || q.len() != n {
            return Err(Error::InvalidArgument(format!(
                "quadratic term is {}x{} with a linear term of length {}",
                p.nrows(),
                p.ncols(),
                q.len()
            )));
        }
        let scale = p.norm().max(1.0);
        let defect = hermitian_defect(p);
        if !(defect <= 1e-10 * scale) {
            return Err(Error::InvalidArgument(format!(
                "quadratic term is not Hermitian (defect {defect:.3e})"
            )));
        }
        let (eig, vecs) = hermitian_eigen(p);
        if let Some(&low) = eig.last() {
            if low < -1e-10 * scale {
                return Err(Error::InvalidArgument(format!(
                    "quadratic term is not PSD (eigenvalue {low:.3e})"
                )));
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&k| eig[k] > 1e-14 * scale).collect();
        let factor = CMatrix::from_fn(keep.len(), n, |row, col| {
            vecs[(col, keep[row])].conj() * eig[keep[row]].sqrt()
        });
        Ok(Self { factor, q, r })
    }

    pub fn value(&self, x: &CVector) -> f64 {
        (&self.factor * x).norm_squared() + 2.0 * self.q.dotc(x).re + self.r
    }
}

/// Minimize `z` subject to quadratic constraints `≤ z` and `|x_n| ≤ bound_n`.
#[derive(Debug, Clone, Default)]
pub struct QcqpMinProgram {
    pub num_vars: usize,
    pub quad: Vec<QuadConstraint>,
    /// `(index, bound)` pairs.
    pub modulus: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct QcqpPoint {
    pub x: CVector,
    pub z: f64,
}

impl QcqpMinProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        if self.quad.is_empty() {
            return Err(Error::InvalidArgument("program has no quadratic constraints".into()));
        }
        for (j, c) in self.quad.iter().enumerate() {
            if c.factor.ncols() != n || c.q.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "quadratic constraint {j} has {} columns and a linear term of length {}, expected {n}",
                    c.factor.ncols(),
                    c.q.len()
                )));
            }
            if !c.r.is_finite() {
                return Err(Error::InvalidArgument(format!("quadratic constraint {j} has non-finite r")));
            }
        }
        for &(idx, bound) in &self.modulus {
            if idx >= n || !(bound >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "modulus constraint |x_{idx}| <= {bound} is malformed"
                )));
            }
        }
        Ok(())
    }

    /// Largest quadratic-constraint value at `x`.
    pub fn objective_at(&self, x: &CVector) -> f64 {
        self.quad.iter().map(|c| c.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn violation(&self, pt: &QcqpPoint) -> f64 {
        let quad = self.objective_at(&pt.x) - pt.z;
        self.modulus
            .iter()
            .map(|&(i, b)| pt.x[i].norm() - b)
            .fold(quad, f64::max)
    }

    /// Every quadratic constraint becomes a rotated cone on `(x, z)`; the
    /// common factor `scale` keeps the cone rows at unit magnitude.
    fn cone_program(&self) -> ConeProgram {
        let n = self.num_vars;
        let nvar = 2 * n + 1;
        let zc = 2 * n;
        let bound = self.modulus.iter().map(|m| m.1).fold(0.0, f64::max).max(1.0);
        let scale = self
            .quad
            .iter()
            .map(|c| {
                c.factor.norm_squared() * bound * bound
                    + 2.0 * c.q.iter().map(|v| v.norm()).sum::<f64>() * bound
                    + c.r.abs()
            })
            .fold(1.0, f64::max);
        let linear: Vec<&QuadConstraint> = self.quad.iter().filter(|c| c.factor.nrows() == 0).collect();
        let rotated: Vec<&QuadConstraint> = self.quad.iter().filter(|c| c.factor.nrows() > 0).collect();
        let mut soc = vec![3; self.modulus.len()];
        soc.extend(rotated.iter().map(|c| 2 * c.factor.nrows() + 2));
        let nonneg = linear.len();
        let rows = nonneg + soc.iter().sum::<usize>();
        let mut g = RMatrix::zeros(rows, nvar);
        let mut h = RVector::zeros(rows);

        // row for (z − 2Re(qᴴx) − r)/den written as s = h − Gx
        let write_affine = |g: &mut RMatrix, h: &mut RVector, r: usize, c: &QuadConstraint, den: f64, offset: f64| {
            for j in 0..n {
                g[(r, j)] = 2.0 * c.q[j].re / den;
                g[(r, n + j)] = 2.0 * c.q[j].im / den;
            }
            g[(r, zc)] = -1.0 / den;
            h[r] = -c.r / den + offset;
        };
        for (r, c) in linear.iter().enumerate() {
            write_affine(&mut g, &mut h, r, c, 1.0, 0.0);
        }
        let mut r = nonneg;
        for &(idx, b) in &self.modulus {
            h[r] = b;
            g[(r + 1, idx)] = -1.0;
            g[(r + 2, n + idx)] = -1.0;
            r += 3;
        }
        let root = scale.sqrt();
        for c in rotated {
            let rows_b = c.factor.nrows();
            write_affine(&mut g, &mut h, r, c, 2.0 * scale, 0.5);
            for i in 0..rows_b {
                for j in 0..n {
                    let bij = c.factor[(i, j)];
                    g[(r + 1 + i, j)] = -bij.re / root;
                    g[(r + 1 + i, n + j)] = bij.im / root;
                    g[(r + 1 + rows_b + i, j)] = -bij.im / root;
                    g[(r + 1 + rows_b + i, n + j)] = -bij.re / root;
                }
            }
            let last = r + 1 + 2 * rows_b;
            write_affine(&mut g, &mut h, last, c, 2.0 * scale, -0.5);
            r = last + 1;
        }
        let mut cvec = RVector::zeros(nvar);
        cvec[zc] = 1.0;
        ConeProgram {
            c: cvec,
            g,
            h,
            a: RMatrix::zeros(0, nvar),
            b: RVector::zeros(0),
            dims: ConeDims {
                nonneg,
                soc,
                psd: vec![],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Feasible,
    Infeasible,
    Optimal,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolverOutcome<P> {
    pub status: SolverStatus,
    pub point: Option<P>,
    /// Feasible: worst violation at the point. Infeasible: certified lower bound
    /// on the phase-I optimum (or the violation of the best point found).
    /// Optimal: duality gap of the reported point.
    pub certificate_gap: f64,
    pub iterations: usize,
}

impl<P> SolverOutcome<P> {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SolverStatus::Feasible | SolverStatus::Optimal)
    }
}

/// The contract the beamforming updates rely on. Implementations must be sound:
/// any `Feasible`/`Optimal` point violates nothing by more than `tol` when
/// re-checked with the program's own `violation`.
pub trait ConicSolver {
    fn soc_feasibility(&self, p: &SocFeasibilityProgram, tol: f64) -> Result<SolverOutcome<RVector>>;
    fn psd_feasibility(&self, p: &PsdFeasibilityProgram, tol: f64) -> Result<SolverOutcome<CMatrix>>;
    fn qcqp_min(&self, p: &QcqpMinProgram, tol: f64) -> Result<SolverOutcome<QcqpPoint>>;
}

/// The embedded primal-dual interior-point backend.
#[derive(Debug, Clone)]
pub struct InteriorPoint {
    pub max_iter: usize,
    /// Return as soon as a PSD point is certified, instead of polishing to optimality.
    pub stop_at_first_feasible: bool,
}

impl Default for InteriorPoint {
    fn default() -> Self {
        Self {
            max_iter: 200,
            stop_at_first_feasible: false,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

fn run_ipm(prog: &ConeProgram, settings: &IpmSettings) -> Result<ipm::IpmSolution> {
    ipm::solve(prog, settings).map_err(Error::InvalidArgument)
}

impl InteriorPoint {
    fn settings(&self, tol: f64) -> IpmSettings {
        IpmSettings {
            max_iter: self.max_iter,
            feas_tol: (tol * 1e-1).max(1e-12),
            abs_gap: (tol * 1e-2).max(1e-13),
            rel_gap: (tol * 1e-2).max(1e-13),
            ..IpmSettings::default()
        }
    }
}

impl ConicSolver for InteriorPoint {
    fn soc_feasibility(&self, p: &SocFeasibilityProgram, tol: f64) -> Result<SolverOutcome<RVector>> {
        check_tol(tol)?;
        p.validate()?;
        let n = p.num_vars;
        let prog = p.phase_one();
        let settings = IpmSettings {
            stop_dobj_above: Some(tol),
            ..self.settings(tol)
        };
        let sol = run_ipm(&prog, &settings)?;
        let x = sol.x.rows(0, n).into_owned();
        let viol = p.violation(&x);
        let viol = if p.soc.is_empty() && p.linear_eq.is_empty() && p.linear_ineq.is_empty() {
            0.0
        } else {
            viol
        };
        // A dual point with residual r bounds the phase-I optimum from below by
        // dobj − ‖r‖·‖x‖ near the optimum; the factor 10 absorbs the gap between x and x*.
        let slack = 10.0 * sol.dres * (1.0 + sol.x.norm());
        let certified_infeasible = sol.dres <= 1e-6 && sol.dobj - slack > tol;
        let (status, point, gap) = if viol <= tol && !certified_infeasible {
            (SolverStatus::Feasible, Some(x), viol.max(0.0))
        } else if certified_infeasible {
            (SolverStatus::Infeasible, None, sol.dobj)
        } else if sol.status == IpmStatus::Optimal {
            // phase-I optimum within a hair of zero but the point misses by more than tol
            (SolverStatus::Infeasible, None, viol)
        } else {
            (SolverStatus::NumericalFailure, None, viol)
        };
        Ok(SolverOutcome {
            status,
            point,
            certificate_gap: gap,
            iterations: sol.iterations,
        })
    }

    fn psd_feasibility(&self, p: &PsdFeasibilityProgram, tol: f64) -> Result<SolverOutcome<CMatrix>> {
        check_tol(tol)?;
        p.validate()?;
        if p.trace.is_empty() && p.entries.is_empty() {
            return Ok(SolverOutcome {
                status: SolverStatus::Feasible,
                point: Some(CMatrix::zeros(p.dim, p.dim)),
                certificate_gap: 0.0,
                iterations: 0,
            });
        }
        let (prog, q_row) = p.phase_one_dual();
        let settings = IpmSettings {
            stop_pobj_below: Some(-(1.0 + tol)),
            stop_dobj_above: self.stop_at_first_feasible.then_some(-1.0),
            ..self.settings(tol)
        };
        let sol = run_ipm(&prog, &settings)?;
        let psd_start = q_row + 1;
        let n2 = 2 * p.dim;
        let z = RMatrix::from_column_slice(n2, n2, &sol.z.as_slice()[psd_start..]);
        let v = extract_hermitian(&z);
        let viol = p.violation(&v);
        let slack = 10.0 * sol.pres * (1.0 + sol.z.norm());
        let certified_infeasible = sol.pres <= 1e-6 && sol.pobj + slack < -(1.0 + tol);
        let (status, point, gap) = if viol <= tol && !certified_infeasible {
            (SolverStatus::Feasible, Some(v), viol.max(0.0))
        } else if certified_infeasible {
            (SolverStatus::Infeasible, None, -sol.pobj - 1.0)
        } else if sol.status == IpmStatus::Optimal {
            (SolverStatus::Infeasible, None, viol)
        } else {
            (SolverStatus::NumericalFailure, None, viol)
        };
        Ok(SolverOutcome {
            status,
            point,
            certificate_gap: gap,
            iterations: sol.iterations,
        })
    }

    fn qcqp_min(&self, p: &QcqpMinProgram, tol: f64) -> Result<SolverOutcome<QcqpPoint>> {
        check_tol(tol)?;
        p.validate()?;
        let n = p.num_vars;
        let prog = p.cone_program();
        let sol = run_ipm(&prog, &self.settings(tol))?;
        let mut x = CVector::from_fn(n, |i, _| C64::new(sol.x[i], sol.x[n + i]));
        for &(idx, bound) in &p.modulus {
            let m = x[idx].norm();
            if m > bound {
                x[idx] *= bound / m;
            }
        }
        let z = p.objective_at(&x);
        let gap = (z - sol.dobj).max(0.0);
        let status = match sol.status {
            IpmStatus::Optimal => SolverStatus::Optimal,
            _ if gap <= tol * z.abs().max(1.0) => SolverStatus::Optimal,
            _ => SolverStatus::NumericalFailure,
        };
        Ok(SolverOutcome {
            status,
            point: Some(QcqpPoint { x, z }),
            certificate_gap: gap,
            iterations: sol.iterations,
        })
    }
}

pub fn solve_soc_feasibility(p: &SocFeasibilityProgram, tol: f64) -> Result<SolverOutcome<RVector>> {
    InteriorPoint::default().soc_feasibility(p, tol)
}

pub fn solve_psd_feasibility(p: &PsdFeasibilityProgram, tol: f64) -> Result<SolverOutcome<CMatrix>> {
    InteriorPoint::default().psd_feasibility(p, tol)
}

pub fn solve_qcqp_min(p: &QcqpMinProgram, tol: f64) -> Result<SolverOutcome<QcqpPoint>> {
    InteriorPoint::default().qcqp_min(p, tol)
}
