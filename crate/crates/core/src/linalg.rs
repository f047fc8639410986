//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Largest entry modulus of a complex matrix.
pub fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, b| a.max(b.norm()))
}

/// Deviation of `m` from being Hermitian.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    cmax_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending order.
/// Column `k` of the returned matrix is a unit eigenvector for eigenvalue `k`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Hermitian inner product `<a, b> = sum conj(a_k) b_k`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Numerical rank by singular values relative to the largest one.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}
