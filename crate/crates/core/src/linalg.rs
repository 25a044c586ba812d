//! Complex vector/matrix aliases and the complex-to-real liftings used by the
//! conic engine.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;
pub type RVector = DVector<f64>;
pub type RMatrix = DMatrix<f64>;

/// `x ∈ ℂⁿ` becomes `[Re x; Im x] ∈ ℝ²ⁿ`.
pub fn lift_vector(x: &CVector) -> RVector {
    let n = x.len();
    RVector::from_fn(2 * n, |i, _| if i < n { x[i].re } else { x[i - n].im })
}

/// Inverse of [`lift_vector`]. Panics if the length is odd.
pub fn unlift_vector(x: &RVector) -> CVector {
    assert!(x.len().is_multiple_of(2), "lifted vector must have even length");
    let n = x.len() / 2;
    CVector::from_fn(n, |i, _| C64::new(x[i], x[n + i]))
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a complex square matrix.
pub fn embed_hermitian(h: &CMatrix) -> RMatrix {
    let n = h.nrows();
    let mut out = RMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i + n, j)] = z.im;
            out[(i, j + n)] = -z.im;
        }
    }
    out
}

/// Recovers the Hermitian matrix whose embedding is closest to `z`: the
/// embedding-structured part of `z` is averaged out before reading it back.
pub fn extract_hermitian(z: &RMatrix) -> CMatrix {
    assert!(z.nrows() == z.ncols() && z.nrows().is_multiple_of(2));
    let n = z.nrows() / 2;
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let re = 0.5 * (z[(i, j)] + z[(i + n, j + n)]);
            let im = 0.5 * (z[(i + n, j)] - z[(i, j + n)]);
            out[(i, j)] = C64::new(re, im);
        }
    }
    // symmetrize against round-off
    let adj = out.adjoint();
    (out + adj) * C64::new(0.5, 0.0)
}

/// Largest deviation from Hermitian symmetry, `max |H - Hᴴ|`.
pub fn hermitian_defect(h: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
/// Returns `(eigenvalues, eigenvectors as columns)`.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let adj = h.adjoint();
    let sym = (h + adj) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `xᴴ A x` for Hermitian `A`, returned as a real number.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cvec(parts: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(parts.len(), parts.iter().map(|&(r, i)| C64::new(r, i)))
    }

    proptest! {
        #[test]
        fn lift_round_trip(parts in proptest::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 0..12)) {
            let x = cvec(&parts);
            prop_assert_eq!(unlift_vector(&lift_vector(&x)), x);
        }

        #[test]
        fn embedding_preserves_quadratic_forms(
            parts in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 9),
            xs in proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3),
        ) {
            let a = CMatrix::from_iterator(3, 3, parts.iter().map(|&(r, i)| C64::new(r, i)));
            let h = &a + a.adjoint();
            let x = cvec(&xs);
            let lhs = quad_form(&h, &x);
            let lx = lift_vector(&x);
            let rhs = lx.dot(&(embed_hermitian(&h) * &lx));
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
            let back = extract_hermitian(&embed_hermitian(&h));
            prop_assert!((back - &h).norm() <= 1e-12 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let a = CMatrix::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - (j as f64) * 0.5));
        let h = &a * a.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(4, vals.iter().map(|&v| C64::new(v, 0.0))));
        let rebuilt = &vecs * diag * vecs.adjoint();
        assert!((rebuilt - &h).norm() < 1e-9 * h.norm());
    }

    #[test]
    fn db_conversions() {
        assert!((db_to_linear(-30.0) - 1e-3).abs() < 1e-18);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }
}
