use super::{fix_phase_matrix, CMatrix, CVector, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Left singular vectors as isometry columns.
    pub u: CMatrix,
    /// Non-increasing singular values.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as isometry columns (so `a = U·diag(s)·V†`).
    pub v: CMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..k {
            let s = self.singular_values[j];
            us.column_mut(j).apply(|z| *z *= s);
        }
        us * self.v.adjoint()
    }
}

/// Thin SVD by one-sided Jacobi rotations.
///
/// Columns whose singular value is negligible get their left singular vectors
/// from an orthonormal completion, so left null vectors stay exact.
pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    if !super::is_finite(a) {
        return Err(Error::NonFinite);
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("SVD of an empty matrix".into()));
    }
    if a.nrows() < a.ncols() {
        let t = jacobi_tall(&a.adjoint())?;
        return Ok(SvdResult {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    jacobi_tall(a)
}

const JACOBI_MAX_SWEEPS: usize = 80;

fn jacobi_tall(a: &CMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    let eps = f64::EPSILON;
    // columns below this squared norm are numerically zero and never rotated
    let floor = (eps * a.norm()).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || alpha <= floor || beta <= floor || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase;
                        mat[(i, p)] = xp * c - xq * s;
                        mat[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "SVD",
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let top = norms[order[0]];
    let cut = top * eps * (m.max(n) as f64) * 4.0;

    let mut u = CMatrix::zeros(m, n);
    let mut vs = CMatrix::zeros(n, n);
    let mut sv = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        vs.set_column(slot, &v.column(j));
        if norms[j] > cut && norms[j] > 0.0 {
            u.set_column(slot, &(w.column(j) / C64::from(norms[j])));
            sv.push(norms[j]);
        } else {
            deficient.push(slot);
            sv.push(if norms[j] > cut { norms[j] } else { 0.0 });
        }
    }
    complete_columns(&mut u, &deficient);
    Ok(SvdResult {
        u,
        singular_values: sv,
        v: vs,
    })
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every other
/// column, picking coordinate axes with the largest orthogonal residual.
fn complete_columns(u: &mut CMatrix, slots: &[usize]) {
    let m = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !slots.contains(j)).collect();
    for &slot in slots {
        let mut best: Option<(f64, CVector)> = None;
        for axis in 0..m {
            let mut x = CVector::zeros(m);
            x[axis] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for &j in &filled {
                    let proj = u.column(j).dotc(&x);
                    x -= u.column(j) * proj;
                }
            }
            let r = x.norm();
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, x));
            }
        }
        let (r, x) = best.expect("at least one axis");
        u.set_column(slot, &(x / C64::from(r)));
        filled.push(slot);
    }
}

/// Unitary `U_c = V′U′†` from `svd(m2 · m1†) = U′D′V′†`.
///
/// `U_c†` is the unitary closest to mapping the columns of `m1` onto the
/// columns of `m2`, i.e. `U_c` maximizes `Re Tr(U_c · m2 · m1†)`. The global
/// phase is normalized so the largest-modulus entry (first in row-major order)
/// is real and positive.
pub fn procrustes(m1: &CMatrix, m2: &CMatrix) -> Result<CMatrix> {
    if m1.shape() != m2.shape() {
        return Err(Error::ShapeMismatch {
            expected: m1.shape(),
            found: m2.shape(),
        });
    }
    let s = svd(&(m2 * m1.adjoint()))?;
    let mut u = &s.v * s.u.adjoint();
    fix_phase_matrix(&mut u);
    Ok(u)
}
