//! Thin wrappers around nalgebra's symmetric/Hermitian eigensolvers that
//! return eigenpairs in ascending eigenvalue order.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// Column `k` of `vectors` belongs to `values[k]`.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Entries smaller than this fraction of the largest one are set to zero
/// before decomposing; products of such entries underflow inside the solver.
pub const FLUSH_RELATIVE: f64 = 1e-100;

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = FLUSH_RELATIVE * scale;
    let flushed = m.map(|z| if z.norm() < floor { Complex64::new(0.0, 0.0) } else { z });
    let eig = SymmetricEigen::new(flushed);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    // stable: ties keep the solver's order
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |i, k| eig.eigenvectors[(i, order[k])]);
    HermitianEigen { values, vectors }
}

/// Eigen-decomposition of a real symmetric 3x3 matrix, eigenvalues ascending.
pub fn symmetric_eigen3(m: &Matrix3<f64>) -> ([f64; 3], [Vector3<f64>; 3]) {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.map(|k| eig.eigenvalues[k]);
    let vectors = order.map(|k| eig.eigenvectors.column(k).into_owned());
    (values, vectors)
}

/// Flip `v` so that its first component with magnitude above `1e-12` is positive.
pub fn fix_sign(v: Vector3<f64>) -> Vector3<f64> {
    match v.iter().find(|c| c.abs() > 1e-12) {
        Some(&c) if c < 0.0 => -v,
        _ => v,
    }
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
