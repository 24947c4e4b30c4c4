use super::{hermitian_residual, is_hermitian, CMatrix, C64};
use crate::error::{Error, Result};
use nalgebra::SymmetricEigen;

const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition `a = V·diag(w)·V†` of a Hermitian matrix with the
/// eigenvalues in descending order.
pub fn eig_hermitian(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.nrows()),
            found: a.shape(),
        });
    }
    if !is_hermitian(a, HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            residual: hermitian_residual(a),
        });
    }
    let n = a.nrows();
    let sym = super::hermitian_part(a);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100 * n.max(1)).ok_or(
        Error::NonConvergence {
            routine: "Hermitian eigensolver",
            iterations: 100 * n.max(1),
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok((values, vectors))
}

/// `exp(scale · h)` for Hermitian `h`, through its eigen-decomposition.
pub fn expm_hermitian(h: &CMatrix, scale: C64) -> Result<CMatrix> {
    let (w, v) = eig_hermitian(h)?;
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        w.len(),
        w.iter().map(|&x| (scale * x).exp()),
    ));
    Ok(&v * d * v.adjoint())
}

/// Derivative of `exp(scale · H(θ))` given `H` and `Ḣ` at the same θ.
///
/// Uses the divided-difference (Daleckii–Krein) form
/// `V [(V† Ḣ V) ∘ Γ] V†` with `Γ_jk = (e^{s w_j} − e^{s w_k}) / (w_j − w_k)`.
pub fn expm_hermitian_derivative(h: &CMatrix, h_dot: &CMatrix, scale: C64) -> Result<CMatrix> {
    if h.shape() != h_dot.shape() {
        return Err(Error::ShapeMismatch {
            expected: h.shape(),
            found: h_dot.shape(),
        });
    }
    let (w, v) = eig_hermitian(h)?;
    let n = w.len();
    let inner = v.adjoint() * h_dot * &v;
    let mut gamma = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let ek = (scale * w[k]).exp();
            let z = scale * (w[j] - w[k]);
            // e^{s w_k} · (e^{z} − 1)/z · s, evaluated stably near z = 0
            let exprel = if z.norm() < 1e-4 {
                C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
            } else {
                (z.exp() - 1.0) / z
            };
            gamma[(j, k)] = ek * exprel * scale;
        }
    }
    Ok(&v * inner.component_mul(&gamma) * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, fro, identity};

    fn sx() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }
    fn sz() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
    }

    #[test]
    fn pauli_spectra() {
        let (w, _) = eig_hermitian(&sz()).unwrap();
        assert_eq!(w, vec![1.0, -1.0]);
        let (w, v) = eig_hermitian(&sx()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // (1, 1)/√2 and (1, −1)/√2 up to phase
        assert!((v[(0, 0)].norm() - s).abs() < 1e-14);
        assert!(((v[(0, 0)] - v[(1, 0)]).norm()) < 1e-14);
        assert!(((v[(0, 1)] + v[(1, 1)]).norm()) < 1e-14);
    }

    #[test]
    fn zero_matrix_gives_identity_basis() {
        let (w, v) = eig_hermitian(&CMatrix::zeros(3, 3)).unwrap();
        assert!(w.iter().all(|&x| x == 0.0));
        assert!(fro(&(v - identity(3))) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exponential_examples() {
        let e = expm_hermitian(&sx(), c64(0., 0.)).unwrap();
        assert!(fro(&(e - identity(2))) < 1e-15);
        let e = expm_hermitian(&sz(), c64(0., -std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((e[(0, 0)] - c64(0., -1.)).norm() < 1e-15);
        assert!((e[(1, 1)] - c64(0., 1.)).norm() < 1e-15);
        let e = expm_hermitian(&sx(), c64(0., -std::f64::consts::PI)).unwrap();
        assert!(fro(&(e + identity(2))) < 1e-14);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h0 = CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.3, 0.), c64(0.2, -0.4), c64(0.2, 0.4), c64(-1.1, 0.)],
        );
        let h1 = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.7), c64(0., -0.7), c64(0.5, 0.)]);
        let s = c64(0., -1.3);
        let theta = 0.4;
        let h = |t: f64| &h0 + &h1 * c64(t, 0.);
        let analytic = expm_hermitian_derivative(&h(theta), &h1, s).unwrap();
        let step = 1e-5;
        let fd = (expm_hermitian(&h(theta + step), s).unwrap() - expm_hermitian(&h(theta - step), s).unwrap())
            / c64(2.0 * step, 0.);
        assert!(fro(&(analytic - fd)) < 1e-9);
    }

    #[test]
    fn degenerate_complex_spectrum_reconstructs() {
        // Rank-2 projector-like matrices in a complex basis, plus a small
        // Liouville-sized case with a four-fold degenerate top eigenvalue.
        let v = CMatrix::from_row_slice(
            3,
            2,
            &[c64(0.6, 0.), c64(0., 0.), c64(0., 0.8), c64(0.3, 0.4), c64(0., 0.), c64(0.5, -0.7)],
        );
        let q = crate::numerics::orthonormal_span(&v, 1e-12).unwrap();
        let p = &q * q.adjoint();
        let big = crate::numerics::kron(&p, &crate::numerics::conj(&p));
        for a in [p, big] {
            let (w, u) = eig_hermitian(&a).unwrap();
            let d = CMatrix::from_diagonal(&crate::numerics::CVector::from_vec(w.iter().map(|&x| c64(x, 0.)).collect()));
            assert!(crate::numerics::fro(&(&u * d * u.adjoint() - &a)) < 1e-12);
            assert!(crate::numerics::unitary_residual(&u) < 1e-12);
        }
    }
}
