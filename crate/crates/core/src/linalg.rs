//! Thin wrappers over nalgebra's symmetric/Hermitian eigensolvers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::CMatrix;
use crate::error::{Error, Result};

/// Sorted eigenvalues of a real symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn herm_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real SPD square root and inverse square root via the eigendecomposition.
pub fn spd_sqrt_pair(h: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !h.is_square() {
        return Err(Error::Mismatch { expected: h.nrows(), got: h.ncols() });
    }
    if (h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) {
        return Err(Error::NotPositive("matrix is not symmetric".into()));
    }
    let eig = h.clone().symmetric_eigen();
    if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::NotPositive(format!("eigenvalue {bad:e}")));
    }
    let q = &eig.eigenvectors;
    let root = q * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * q.transpose();
    let inv_root = q * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt())) * q.transpose();
    Ok((root, inv_root))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
