//! Dense Hermitian spectral calculus on single matrix blocks.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::{Matrix, C64};

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &Matrix) -> (DVector<f64>, Matrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// `f` applied to the spectrum of the Hermitian part of `m`.
pub fn hermitian_apply(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * f(values[j])
    });
    &scaled * vectors.adjoint()
}

pub fn singular_values(m: &Matrix) -> DVector<f64> {
    m.clone().singular_values()
}

/// Thin SVD `m = U diag(s) V*`.
pub fn svd(m: &Matrix) -> (Matrix, DVector<f64>, Matrix) {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    (u, svd.singular_values, v_t.adjoint())
}

/// `(m*m)^{r/2}` through the SVD, `V diag(s^r) V*`.
pub fn abs_power(m: &Matrix, r: f64) -> Matrix {
    let (_, s, v) = svd(m);
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| {
        let sj = s[j];
        v[(i, j)] * if sj > 0.0 { sj.powf(r) } else { 0.0 }
    });
    &scaled * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::real_matrix;

    #[test]
    fn eigen_is_sorted() {
        let m = real_matrix(3, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let (v, _) = hermitian_eigen(&m);
        assert_eq!(v.as_slice(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn apply_reconstructs_with_identity_function() {
        let m = real_matrix(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let back = hermitian_apply(&m, |l| l);
        assert!((back - m).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn abs_power_of_nilpotent() {
        let m = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let a = abs_power(&m, 1.0);
        let expected = real_matrix(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!((a - expected).iter().all(|z| z.norm() < 1e-12));
    }
}
