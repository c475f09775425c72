//! Small dense complex linear-algebra helpers shared by the other modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITERS: usize = 10_000;
const SVD_MAX_ITERS: usize = 10_000;

/// Max reconstruction error tolerated by [`spectral_decomposition`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Max |U U† - I| entry.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u * u.adjoint()), &CMatrix::identity(n, n))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues sorted descending with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= lam;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition with a reconstruction check.
///
/// The input is symmetrized first; a solver that fails to converge, or a
/// result whose reconstruction error exceeds [`RECONSTRUCTION_TOL`], is
/// reported as [`Error::NumericalInstability`].
pub fn spectral_decomposition(m: &CMatrix) -> Result<SpectralDecomposition> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.nrows(), m.ncols())));
    }
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h.clone(), EIGEN_EPS, EIGEN_MAX_ITERS)
        .ok_or_else(|| Error::NumericalInstability("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(h.nrows(), h.ncols(), |r, k| eig.eigenvectors[(r, order[k])]);
    let sd = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let err = max_abs_diff(&sd.reconstruct(), &h);
    if err.is_nan() || err > RECONSTRUCTION_TOL {
        return Err(Error::NumericalInstability(format!(
            "eigendecomposition reconstruction error {err:e}"
        )));
    }
    Ok(sd)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    spectral_decomposition(m).map(|sd| sd.eigenvalues)
}

/// Unitary polar factor `W V†` of `m = W Σ V†`.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    let svd = SVD::try_new(m.clone(), true, true, f64::EPSILON, SVD_MAX_ITERS)
        .ok_or_else(|| Error::NumericalInstability("polar decomposition did not converge".into()))?;
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => Ok(u * v_t),
        _ => Err(Error::NumericalInstability(
            "polar decomposition missing factors".into(),
        )),
    }
}

/// Kronecker product; the first factor carries the slow index.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an `n²×n²` matrix over the named factor, returning `n×n`.
pub fn partial_trace_matrix(m: &CMatrix, n: usize, traced: Subsystem) -> Result<CMatrix> {
    let d = n * n;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::dims(format!("{d}x{d}"), format!("{}x{}", m.nrows(), m.ncols())));
    }
    let out = match traced {
        Subsystem::First => CMatrix::from_fn(n, n, |b, bp| (0..n).map(|a| m[(a * n + b, a * n + bp)]).sum()),
        Subsystem::Second => CMatrix::from_fn(n, n, |a, ap| (0..n).map(|b| m[(a * n + b, ap * n + b)]).sum()),
    };
    Ok(out)
}

/// `⟨v|m|v⟩`, real part.
pub fn expectation(m: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(m * v)).re
}
