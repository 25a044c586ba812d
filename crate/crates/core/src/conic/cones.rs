//! Symmetric cone kernels: nonnegative orthant, second-order cones and real
//! PSD cones (stored as full column-major `p×p` matrices so that the plain
//! vector inner product equals the trace inner product).

use crate::linalg::{RMatrix, RVector};
use nalgebra::{DVectorView, SymmetricEigen};

/// Layout of the product cone: orthant first, then each SOC, then each PSD block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConeDims {
    pub nonneg: usize,
    pub soc: Vec<usize>,
    pub psd: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BlockKind {
    Nonneg,
    Soc,
    Psd(usize),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Block {
    pub kind: BlockKind,
    pub offset: usize,
    pub len: usize,
}

impl ConeDims {
    pub fn total(&self) -> usize {
        self.nonneg + self.soc.iter().sum::<usize>() + self.psd.iter().map(|p| p * p).sum::<usize>()
    }

    /// Barrier degree `ν`.
    pub fn degree(&self) -> usize {
        self.nonneg + self.soc.len() + self.psd.iter().sum::<usize>()
    }

    pub(crate) fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::with_capacity(1 + self.soc.len() + self.psd.len());
        let mut offset = 0;
        if self.nonneg > 0 {
            out.push(Block {
                kind: BlockKind::Nonneg,
                offset,
                len: self.nonneg,
            });
            offset += self.nonneg;
        }
        for &q in &self.soc {
            out.push(Block {
                kind: BlockKind::Soc,
                offset,
                len: q,
            });
            offset += q;
        }
        for &p in &self.psd {
            out.push(Block {
                kind: BlockKind::Psd(p),
                offset,
                len: p * p,
            });
            offset += p * p;
        }
        out
    }
}

fn as_matrix(x: &[f64], p: usize) -> RMatrix {
    RMatrix::from_column_slice(p, p, x)
}

fn sym(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

/// Identity element `e` of the product cone.
pub(crate) fn identity(dims: &ConeDims) -> RVector {
    let mut e = RVector::zeros(dims.total());
    for b in dims.blocks() {
        match b.kind {
            BlockKind::Nonneg => e.rows_mut(b.offset, b.len).fill(1.0),
            BlockKind::Soc => e[b.offset] = 1.0,
            BlockKind::Psd(p) => {
                for i in 0..p {
                    e[b.offset + i * p + i] = 1.0;
                }
            }
        }
    }
    e
}

/// Smallest "eigenvalue" of `x` with respect to the cone (negative when outside).
pub(crate) fn min_eigenvalue(dims: &ConeDims, x: &RVector) -> f64 {
    let mut worst = f64::INFINITY;
    for b in dims.blocks() {
        let xb = &x.as_slice()[b.offset..b.offset + b.len];
        let v = match b.kind {
            BlockKind::Nonneg => xb.iter().copied().fold(f64::INFINITY, f64::min),
            BlockKind::Soc => xb[0] - xb[1..].iter().map(|t| t * t).sum::<f64>().sqrt(),
            BlockKind::Psd(p) => SymmetricEigen::new(sym(&as_matrix(xb, p)))
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
        };
        worst = worst.min(v);
    }
    worst
}

#[derive(Debug, Clone)]
enum BlockScaling {
    /// `W = diag(d)`
    Nonneg { d: Vec<f64> },
    /// `W = β W̄`, `W̄ = [[w₀, w₁ᵀ], [w₁, I + w₁w₁ᵀ/(1+w₀)]]`, `wᵀJw = 1`.
    Soc { beta: f64, w: Vec<f64> },
    /// `W(U) = RᵀUR`, `W⁻ᵀ(U) = R⁻¹UR⁻ᵀ` with `R⁻ᵀ = rti`.
    Psd { p: usize, r: RMatrix, rti: RMatrix },
}

/// Nesterov–Todd scaling of a primal-dual pair together with the scaled
/// point `λ = W z = W⁻ᵀ s`.
#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    blocks: Vec<(Block, BlockScaling)>,
    pub lambda: RVector,
}

/// Which of the four linear maps to apply.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Op {
    W,
    WInv,
    WT,
    WInvT,
}

impl Scaling {
    /// Returns `None` when `s` or `z` is not strictly interior.
    pub fn compute(dims: &ConeDims, s: &RVector, z: &RVector) -> Option<Self> {
        let mut blocks = Vec::new();
        let mut lambda = RVector::zeros(dims.total());
        for b in dims.blocks() {
            let sb = &s.as_slice()[b.offset..b.offset + b.len];
            let zb = &z.as_slice()[b.offset..b.offset + b.len];
            let lb = &mut lambda.as_mut_slice()[b.offset..b.offset + b.len];
            let scaling = match b.kind {
                BlockKind::Nonneg => {
                    let mut d = Vec::with_capacity(b.len);
                    for i in 0..b.len {
                        if !(sb[i] > 0.0 && zb[i] > 0.0) {
                            return None;
                        }
                        d.push((sb[i] / zb[i]).sqrt());
                        lb[i] = (sb[i] * zb[i]).sqrt();
                    }
                    BlockScaling::Nonneg { d }
                }
                BlockKind::Soc => {
                    let jn = |x: &[f64]| x[0] * x[0] - x[1..].iter().map(|t| t * t).sum::<f64>();
                    let (ss, zz) = (jn(sb), jn(zb));
                    if !(ss > 0.0 && zz > 0.0 && sb[0] > 0.0 && zb[0] > 0.0) {
                        return None;
                    }
                    let (aa, bb) = (ss.sqrt(), zz.sqrt());
                    let dot: f64 = sb.iter().zip(zb).map(|(a, b)| a * b).sum();
                    let cc = ((dot / (aa * bb) + 1.0) / 2.0).sqrt();
                    let mut w: Vec<f64> = Vec::with_capacity(b.len);
                    w.push((sb[0] / aa + zb[0] / bb) / (2.0 * cc));
                    for i in 1..b.len {
                        w.push((sb[i] / aa - zb[i] / bb) / (2.0 * cc));
                    }
                    let beta = (aa / bb).sqrt();
                    let sc = BlockScaling::Soc { beta, w };
                    let wz = apply_block(&sc, Op::W, zb);
                    lb.copy_from_slice(&wz);
                    sc
                }
                BlockKind::Psd(p) => {
                    let sm = sym(&as_matrix(sb, p));
                    let zm = sym(&as_matrix(zb, p));
                    let ls = sm.cholesky()?.l();
                    let lz = zm.cholesky()?.l();
                    let svd = (lz.transpose() * &ls).svd(true, true);
                    let u = svd.u?;
                    let vt = svd.v_t?;
                    let sv = svd.singular_values;
                    if sv.iter().any(|x| !(*x > 0.0)) {
                        return None;
                    }
                    let inv_sqrt = RMatrix::from_diagonal(&sv.map(|x| 1.0 / x.sqrt()));
                    let r = &ls * vt.transpose() * &inv_sqrt;
                    let rti = &lz * &u * &inv_sqrt;
                    for i in 0..p {
                        lb[i * p + i] = sv[i];
                    }
                    BlockScaling::Psd { p, r, rti }
                }
            };
            blocks.push((b, scaling));
        }
        Some(Self { blocks, lambda })
    }

    pub fn apply(&self, op: Op, x: &RVector) -> RVector {
        let mut out = RVector::zeros(x.len());
        for (b, sc) in &self.blocks {
            let xb = &x.as_slice()[b.offset..b.offset + b.len];
            let yb = apply_block(sc, op, xb);
            out.as_mut_slice()[b.offset..b.offset + b.len].copy_from_slice(&yb);
        }
        out
    }

    /// Applies `op` to every column of `g`.
    pub fn apply_columns(&self, op: Op, g: &RMatrix) -> RMatrix {
        let mut out = RMatrix::zeros(g.nrows(), g.ncols());
        for j in 0..g.ncols() {
            let col = g.column(j).into_owned();
            out.set_column(j, &self.apply(op, &col));
        }
        out
    }
}

fn apply_block(sc: &BlockScaling, op: Op, x: &[f64]) -> Vec<f64> {
    match sc {
        BlockScaling::Nonneg { d } => match op {
            Op::W | Op::WT => x.iter().zip(d).map(|(a, b)| a * b).collect(),
            Op::WInv | Op::WInvT => x.iter().zip(d).map(|(a, b)| a / b).collect(),
        },
        BlockScaling::Soc { beta, w } => {
            let w0 = w[0];
            let w1 = &w[1..];
            let x0 = x[0];
            let x1 = &x[1..];
            let w1x1: f64 = w1.iter().zip(x1).map(|(a, b)| a * b).sum();
            let (head, coef, scale) = match op {
                // W̄ x = [w₀x₀ + w₁ᵀx₁; x₁ + (x₀ + w₁ᵀx₁/(1+w₀)) w₁]
                Op::W | Op::WT => (w0 * x0 + w1x1, x0 + w1x1 / (1.0 + w0), *beta),
                // W̄⁻¹ = J W̄ J
                Op::WInv | Op::WInvT => (w0 * x0 - w1x1, -x0 + w1x1 / (1.0 + w0), 1.0 / beta),
            };
            let mut y = Vec::with_capacity(x.len());
            y.push(scale * head);
            for i in 0..x1.len() {
                y.push(scale * (x1[i] + coef * w1[i]));
            }
            y
        }
        BlockScaling::Psd { p, r, rti } => {
            let u = as_matrix(x, *p);
            let m = match op {
                Op::W => r.transpose() * u * r,
                Op::WT => r * u * r.transpose(),
                Op::WInvT => rti.transpose() * u * rti,
                Op::WInv => rti * u * rti.transpose(),
            };
            m.as_slice().to_vec()
        }
    }
}

/// Jordan product `a ∘ b`.
pub(crate) fn jordan_product(dims: &ConeDims, a: &RVector, b: &RVector) -> RVector {
    let mut out = RVector::zeros(a.len());
    for blk in dims.blocks() {
        let ab = &a.as_slice()[blk.offset..blk.offset + blk.len];
        let bb = &b.as_slice()[blk.offset..blk.offset + blk.len];
        let ob = &mut out.as_mut_slice()[blk.offset..blk.offset + blk.len];
        match blk.kind {
            BlockKind::Nonneg => {
                for i in 0..blk.len {
                    ob[i] = ab[i] * bb[i];
                }
            }
            BlockKind::Soc => {
                ob[0] = ab.iter().zip(bb).map(|(x, y)| x * y).sum();
                for i in 1..blk.len {
                    ob[i] = ab[0] * bb[i] + bb[0] * ab[i];
                }
            }
            BlockKind::Psd(p) => {
                let am = as_matrix(ab, p);
                let bm = as_matrix(bb, p);
                let m = (&am * &bm + &bm * &am) * 0.5;
                ob.copy_from_slice(m.as_slice());
            }
        }
    }
    out
}

/// Solves `λ ∘ u = r` for `u`, where `λ` is a scaled point (PSD blocks diagonal).
pub(crate) fn jordan_divide(dims: &ConeDims, lambda: &RVector, r: &RVector) -> RVector {
    let mut out = RVector::zeros(r.len());
    for blk in dims.blocks() {
        let lb = &lambda.as_slice()[blk.offset..blk.offset + blk.len];
        let rb = &r.as_slice()[blk.offset..blk.offset + blk.len];
        let ob = &mut out.as_mut_slice()[blk.offset..blk.offset + blk.len];
        match blk.kind {
            BlockKind::Nonneg => {
                for i in 0..blk.len {
                    ob[i] = rb[i] / lb[i];
                }
            }
            BlockKind::Soc => {
                let l0 = lb[0];
                let det = l0 * l0 - lb[1..].iter().map(|t| t * t).sum::<f64>();
                let l1r1: f64 = lb[1..].iter().zip(&rb[1..]).map(|(a, b)| a * b).sum();
                let u0 = (l0 * rb[0] - l1r1) / det;
                ob[0] = u0;
                for i in 1..blk.len {
                    ob[i] = (rb[i] - u0 * lb[i]) / l0;
                }
            }
            BlockKind::Psd(p) => {
                for j in 0..p {
                    for i in 0..p {
                        let li = lb[i * p + i];
                        let lj = lb[j * p + j];
                        ob[j * p + i] = 2.0 * rb[j * p + i] / (li + lj);
                    }
                }
            }
        }
    }
    out
}

/// Largest `α ≥ 0` (possibly `∞`) with `λ + α d` in the cone, for a scaled point `λ`.
pub(crate) fn max_step(dims: &ConeDims, lambda: &RVector, d: &RVector) -> f64 {
    let mut alpha = f64::INFINITY;
    for blk in dims.blocks() {
        let lb = lambda.rows(blk.offset, blk.len);
        let db = d.rows(blk.offset, blk.len);
        let a = match blk.kind {
            BlockKind::Nonneg => lb
                .iter()
                .zip(db.iter())
                .filter(|(_, di)| **di < 0.0)
                .map(|(li, di)| -li / di)
                .fold(f64::INFINITY, f64::min),
            BlockKind::Soc => soc_max_step(lb, db),
            BlockKind::Psd(p) => {
                let mut m = RMatrix::zeros(p, p);
                for j in 0..p {
                    for i in 0..p {
                        let scale = 1.0 / (lb[i * p + i] * lb[j * p + j]).sqrt();
                        m[(i, j)] = 0.5 * (db[j * p + i] + db[i * p + j]) * scale;
                    }
                }
                let min_eig = SymmetricEigen::new(m)
                    .eigenvalues
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                if min_eig < 0.0 {
                    -1.0 / min_eig
                } else {
                    f64::INFINITY
                }
            }
        };
        alpha = alpha.min(a);
    }
    alpha
}

fn soc_max_step(x: DVectorView<f64>, d: DVectorView<f64>) -> f64 {
    // f(α) = (x₀+αd₀)² − ‖x₁+αd₁‖² = aα² + 2bα + c, c > 0; the first positive root bounds the step.
    let tail = |u: &DVectorView<f64>, v: &DVectorView<f64>| -> f64 {
        u.iter().skip(1).zip(v.iter().skip(1)).map(|(a, b)| a * b).sum()
    };
    let a = d[0] * d[0] - tail(&d, &d);
    let b = x[0] * d[0] - tail(&x, &d);
    let c = x[0] * x[0] - tail(&x, &x);
    let mut roots = Vec::with_capacity(2);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-14 * scale {
        if b < 0.0 {
            roots.push(-c / (2.0 * b));
        }
    } else {
        let disc = b * b - a * c;
        if disc >= 0.0 {
            let q = -(b + b.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push((-c / a).abs().sqrt());
            }
        }
    }
    let mut alpha = roots
        .into_iter()
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    // leaving through the apex direction (x₀ + αd₀ < 0 without a root) cannot happen
    // for interior x, but guard the degenerate linear case
    if d[0] < 0.0 {
        alpha = alpha.min(-x[0] / d[0]);
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dims() -> ConeDims {
        ConeDims {
            nonneg: 3,
            soc: vec![4, 2],
            psd: vec![3],
        }
    }

    fn interior(dims: &ConeDims, rng: &mut impl Rng) -> RVector {
        let mut x = RVector::zeros(dims.total());
        for b in dims.blocks() {
            match b.kind {
                BlockKind::Nonneg => {
                    for i in 0..b.len {
                        x[b.offset + i] = rng.gen_range(0.1..3.0);
                    }
                }
                BlockKind::Soc => {
                    let mut nrm: f64 = 0.0;
                    for i in 1..b.len {
                        let v = rng.gen_range(-1.0..1.0);
                        x[b.offset + i] = v;
                        nrm += v * v;
                    }
                    x[b.offset] = nrm.sqrt() + rng.gen_range(0.1..2.0);
                }
                BlockKind::Psd(p) => {
                    let a = RMatrix::from_fn(p, p, |_, _| rng.gen_range(-1.0..1.0));
                    let m = &a * a.transpose() + RMatrix::identity(p, p) * 0.2;
                    x.rows_mut(b.offset, b.len).copy_from_slice(m.as_slice());
                }
            }
        }
        x
    }

    #[test]
    fn nt_scaling_maps_both_points_to_lambda() {
        let d = dims();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = interior(&d, &mut rng);
            let z = interior(&d, &mut rng);
            let w = Scaling::compute(&d, &s, &z).expect("interior");
            let wz = w.apply(Op::W, &z);
            let wits = w.apply(Op::WInvT, &s);
            assert!((&wz - &w.lambda).norm() < 1e-9 * (1.0 + wz.norm()), "{wz} vs {}", w.lambda);
            assert!((&wits - &w.lambda).norm() < 1e-9 * (1.0 + wits.norm()));
            let x = interior(&d, &mut rng);
            let back = w.apply(Op::WInv, &w.apply(Op::W, &x));
            assert!((back - &x).norm() < 1e-9 * x.norm());
            let back = w.apply(Op::WInvT, &w.apply(Op::WT, &x));
            assert!((back - &x).norm() < 1e-9 * x.norm());
            // adjoint pair: <W x, y> = <x, Wᵀ y>
            let y = interior(&d, &mut rng);
            let lhs = w.apply(Op::W, &x).dot(&y);
            let rhs = x.dot(&w.apply(Op::WT, &y));
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
            // gap is preserved
            assert!((w.lambda.dot(&w.lambda) - s.dot(&z)).abs() < 1e-9 * s.dot(&z));
        }
    }

    #[test]
    fn jordan_divide_inverts_product() {
        let d = dims();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = interior(&d, &mut rng);
        let z = interior(&d, &mut rng);
        let w = Scaling::compute(&d, &s, &z).unwrap();
        let mut r = RVector::from_fn(d.total(), |_, _| rng.gen_range(-1.0..1.0));
        // keep PSD blocks symmetric
        for b in d.blocks() {
            if let BlockKind::Psd(p) = b.kind {
                let m = sym(&as_matrix(&r.as_slice()[b.offset..b.offset + b.len], p));
                r.rows_mut(b.offset, b.len).copy_from_slice(m.as_slice());
            }
        }
        let u = jordan_divide(&d, &w.lambda, &r);
        let back = jordan_product(&d, &w.lambda, &u);
        assert!((back - &r).norm() < 1e-10 * r.norm());
    }

    #[test]
    fn max_step_lands_on_boundary() {
        let d = dims();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = interior(&d, &mut rng);
            let z = interior(&d, &mut rng);
            let w = Scaling::compute(&d, &s, &z).unwrap();
            let mut dir = RVector::from_fn(d.total(), |_, _| rng.gen_range(-3.0..1.0));
            for b in d.blocks() {
                if let BlockKind::Psd(p) = b.kind {
                    let m = sym(&as_matrix(&dir.as_slice()[b.offset..b.offset + b.len], p));
                    dir.rows_mut(b.offset, b.len).copy_from_slice(m.as_slice());
                }
            }
            let a = max_step(&d, &w.lambda, &dir);
            assert!(a.is_finite() && a > 0.0);
            let inside = &w.lambda + &dir * (0.999 * a);
            let edge = &w.lambda + &dir * a;
            assert!(min_eigenvalue(&d, &inside) > -1e-12);
            assert!(min_eigenvalue(&d, &edge).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_has_unit_min_eigenvalue() {
        let d = dims();
        let e = identity(&d);
        assert!((min_eigenvalue(&d, &e) - 1.0).abs() < 1e-12);
        assert_eq!(d.degree(), 3 + 2 + 3);
        assert_eq!(d.total(), 3 + 4 + 2 + 9);
    }
}
