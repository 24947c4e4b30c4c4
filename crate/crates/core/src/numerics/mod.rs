//! Dense complex linear algebra used by the channel analysis.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. The serialized form
//! used by the CLI is row-major; use [`cmatrix_from_rows`] to build a matrix
//! from such data with the finiteness check applied.

mod eig;
mod hermitian;
mod svd;

pub use eig::{eig_general, eig_general_with, eigenspace, EigPair, Eigenspace};
pub use hermitian::{eig_hermitian, expm_hermitian, expm_hermitian_derivative};
pub use svd::{procrustes, svd, SvdResult};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default relative threshold for grouping eigenvalues into clusters.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a `rows × cols` matrix from row-major entries.
pub fn cmatrix_from_rows(rows: usize, cols: usize, entries: &[C64]) -> Result<CMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
    }
    if rows * cols != entries.len() {
        return Err(Error::InvalidInput(format!(
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(CMatrix::from_row_slice(rows, cols, entries))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Frobenius norm.
pub fn fro(m: &CMatrix) -> f64 {
    m.norm()
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Elementwise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    fro(&(m - m.adjoint()))
}

/// `true` when `‖m − m†‖ ≤ tol·max(1, ‖m‖)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_residual(m) <= tol * fro(m).max(1.0)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn unitary_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    fro(&(u.adjoint() * u - identity(u.nrows())))
}

/// Hilbert–Schmidt inner product `Tr(A†B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Rescales `v` so its largest-modulus entry is real and positive.
///
/// Entries within a relative 1e-9 of the maximum count as ties; the first one
/// in storage order wins.
pub(crate) fn fix_phase_vector(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = pivot.conj() / pivot.norm();
        v.apply(|z| *z *= phase);
    }
}

/// Matrix analogue of `fix_phase_vector`, scanning entries in row-major order.
pub fn fix_phase_matrix(m: &mut CMatrix) {
    let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let (rows, cols) = m.shape();
    let mut pivot = None;
    'outer: for i in 0..rows {
        for j in 0..cols {
            if m[(i, j)].norm() >= max * (1.0 - 1e-9) {
                pivot = Some(m[(i, j)]);
                break 'outer;
            }
        }
    }
    if let Some(p) = pivot {
        let phase = p.conj() / p.norm();
        m.apply(|z| *z *= phase);
    }
}

/// Orthonormal basis of the column span, via SVD with relative rank cut `tol`.
pub(crate) fn orthonormal_span(cols: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = cols.nrows();
    if cols.ncols() == 0 {
        return Ok(CMatrix::zeros(n, 0));
    }
    let s = svd(cols)?;
    let scale = s.singular_values.first().copied().unwrap_or(0.0).max(1.0);
    let rank = s.singular_values.iter().filter(|&&x| x > tol * scale).count();
    Ok(s.u.columns(0, rank).into_owned())
}
