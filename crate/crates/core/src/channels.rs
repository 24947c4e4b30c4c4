//! Kraus and Liouville (transition-matrix) channel representations.
//!
//! States are vectorized row-major, `|ρ⟩⟩ = (ρ₁₁, ρ₁₂, …, ρ_dd)`, so that a
//! channel with Kraus operators `K_i` acts as `T = Σ K_i ⊗ K_i*`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    conj, eig_hermitian, fro, hermitian_part, hermitian_residual, identity, is_finite, kron,
    op_norm, trace, unitary_residual, CMatrix, CVector, C64,
};

/// Tolerance for completeness, trace preservation and unitarity checks.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Most negative Choi eigenvalue accepted for channels read from files.
pub const CHOI_TOL: f64 = 1e-9;
/// Drift allowed in a density matrix produced by applying a channel.
pub const APPLY_DRIFT_TOL: f64 = 1e-9;

pub const DEFAULT_CENTRAL_STEP: f64 = 1e-6;
pub const DEFAULT_ONE_SIDED_STEP: f64 = 1e-7;

/// Row-major flattening of a square matrix.
pub fn vectorize(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

/// Inverse of [`vectorize`] for a `d × d` matrix.
pub fn unvectorize(v: &CVector, d: usize) -> Result<CMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    Ok(CMatrix::from_row_slice(d, d, v.as_slice()))
}

/// `U ⊗ U*`, the transition matrix of the unitary channel `ρ ↦ UρU†`.
pub fn unitary_transition(u: &CMatrix) -> CMatrix {
    kron(u, &conj(u))
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

// ---------------------------------------------------------------------------
// Density matrices

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(rho: CMatrix) -> Result<Self> {
        Self::with_tolerance(rho, STRUCTURE_TOL)
    }

    pub fn with_tolerance(rho: CMatrix, tol: f64) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::ShapeMismatch {
                expected: (rho.nrows(), rho.nrows()),
                found: rho.shape(),
            });
        }
        if !is_finite(&rho) {
            return Err(Error::NonFinite);
        }
        let herm = hermitian_residual(&rho);
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (‖ρ − ρ†‖ = {herm:.3e})"
            )));
        }
        let rho = hermitian_part(&rho);
        let tr = trace(&rho);
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (w, _) = eig_hermitian(&rho)?;
        let min = w.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            rho: identity(d).unscale(d as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a vector normalized within 1e-10.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self {
            rho: psi * psi.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn vectorize(&self) -> CVector {
        vectorize(&self.rho)
    }

    pub fn purity(&self) -> f64 {
        self.rho.norm_squared()
    }
}

// ---------------------------------------------------------------------------
// Kraus form

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Checks shapes, finiteness and `‖Σ K†K − I‖ ≤ 1e-10`.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::unchecked(ops)?;
        let residual = ch.completeness_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(ch)
    }

    /// Shape and finiteness checks only.
    pub(crate) fn unchecked(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidInput("a channel needs at least one Kraus operator".into()))?;
        let d = first.nrows();
        for k in &ops {
            if k.shape() != (d, d) {
                return Err(Error::ShapeMismatch {
                    expected: (d, d),
                    found: k.shape(),
                });
            }
            if !is_finite(k) {
                return Err(Error::NonFinite);
            }
        }
        if d == 0 {
            return Err(Error::InvalidInput("Kraus operators must be non-empty".into()));
        }
        Ok(Self { dim: d, ops })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            ops: vec![identity(d)],
        }
    }

    pub fn unitary(u: &CMatrix) -> Result<Self> {
        check_unitary(u)?;
        Ok(Self {
            dim: u.nrows(),
            ops: vec![u.clone()],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .ops
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k.adjoint() * k);
        fro(&(sum - identity(self.dim)))
    }

    /// `Σ K X K†` for an arbitrary `d × d` matrix `X`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k * x * k.adjoint())
    }

    /// Kraus operators `U·K_i` of the channel followed by the unitary `U`.
    pub fn then_unitary(&self, u: &CMatrix) -> Result<Self> {
        check_unitary(u)?;
        if u.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.nrows(),
            });
        }
        Ok(Self {
            dim: self.dim,
            ops: self.ops.iter().map(|k| u * k).collect(),
        })
    }

    pub fn transition(&self) -> TransitionMatrix {
        kraus_to_transition(self)
    }
}

/// `T = Σ K_i ⊗ K_i*`.
pub fn kraus_to_transition(ch: &KrausChannel) -> TransitionMatrix {
    let n = ch.dim * ch.dim;
    let t = ch
        .ops
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, k| acc + unitary_transition(k));
    TransitionMatrix { dim: ch.dim, t }
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    let residual = unitary_residual(u);
    if residual > STRUCTURE_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Liouville form

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    t: CMatrix,
}

impl TransitionMatrix {
    /// Accepts a `d² × d²` matrix satisfying `⟨⟨I|T = ⟨⟨I|` within 1e-10.
    ///
    /// Complete positivity is not checked; use [`Self::from_untrusted`] for
    /// matrices that did not come from a Kraus decomposition.
    pub fn new(t: CMatrix) -> Result<Self> {
        let tm = Self::unchecked(t)?;
        let residual = tm.trace_preservation_residual();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(tm)
    }

    /// [`Self::new`] plus a Choi-matrix positivity check.
    pub fn from_untrusted(t: CMatrix) -> Result<Self> {
        let tm = Self::new(t)?;
        let min = tm.choi_min_eigenvalue()?;
        if min < -CHOI_TOL {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        Ok(tm)
    }

    pub(crate) fn unchecked(t: CMatrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::ShapeMismatch {
                expected: (t.nrows(), t.nrows()),
                found: t.shape(),
            });
        }
        let dim = integer_sqrt(t.nrows()).filter(|&d| d > 0).ok_or_else(|| {
            Error::InvalidInput(format!(
                "transition matrix side {} is not a perfect square",
                t.nrows()
            ))
        })?;
        if !is_finite(&t) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, t })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            t: identity(d * d),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn into_matrix(self) -> CMatrix {
        self.t
    }

    /// `‖⟨⟨I|T − ⟨⟨I|‖`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let vi = vectorize(&identity(self.dim));
        let row = vi.adjoint() * &self.t;
        (row - vi.adjoint()).norm()
    }

    /// Choi matrix `Σ vec(K)vec(K)†`, obtained by reshuffling `T`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut j = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        j[(a * d + c, b * d + e)] = self.t[(a * d + b, c * d + e)];
                    }
                }
            }
        }
        j
    }

    fn choi_min_eigenvalue(&self) -> Result<f64> {
        let choi = self.choi();
        let herm = hermitian_residual(&choi);
        if herm > STRUCTURE_TOL * fro(&choi).max(1.0) {
            // A non-Hermitian Choi matrix means the map is not Hermiticity
            // preserving, so it cannot be completely positive.
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: f64::NAN,
            });
        }
        let (w, _) = eig_hermitian(&hermitian_part(&choi))?;
        Ok(w.last().copied().unwrap_or(0.0))
    }

    /// `T|X⟩⟩` reshaped back into a matrix.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.nrows(),
            });
        }
        unvectorize(&(&self.t * vectorize(x)), self.dim)
    }
}

/// One channel use applied to a state.
pub fn apply_channel(t: &TransitionMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = t.apply(rho.matrix())?;
    DensityMatrix::with_tolerance(out, APPLY_DRIFT_TOL)
}

/// `(U ⊗ U*)·T`: the channel followed by the control unitary `U`.
pub fn compose_control(t: &TransitionMatrix, u: &CMatrix) -> Result<TransitionMatrix> {
    check_unitary(u)?;
    if u.nrows() != t.dim {
        return Err(Error::DimensionMismatch {
            expected: t.dim,
            found: u.nrows(),
        });
    }
    Ok(TransitionMatrix {
        dim: t.dim,
        t: unitary_transition(u) * &t.t,
    })
}

/// `true` iff `‖T|I⟩⟩ − |I⟩⟩‖ ≤ 1e-10`.
///
/// For unital channels the largest singular value is additionally asserted
/// to be at most `1 + 1e-9`.
pub fn unitality_check(t: &TransitionMatrix) -> bool {
    let vi = vectorize(&identity(t.dim));
    let unital = (&t.t * &vi - &vi).norm() <= STRUCTURE_TOL;
    if unital {
        let s = op_norm(&t.t);
        assert!(
            s <= 1.0 + 1e-9,
            "unital transition matrix has singular value {s} > 1"
        );
    }
    unital
}

// ---------------------------------------------------------------------------
// Parametrized families

pub type TransitionFn = Arc<dyn Fn(f64) -> Result<TransitionMatrix> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(f64) -> Result<CMatrix> + Send + Sync>;
pub type KrausFn = Arc<dyn Fn(f64) -> Result<KrausChannel> + Send + Sync>;
pub type KrausDotFn = Arc<dyn Fn(f64) -> Result<Vec<CMatrix>> + Send + Sync>;

#[derive(Clone)]
pub enum DerivativeMode {
    /// `Ṫ(θ)` supplied in closed form.
    Analytic(MatrixFn),
    CentralDifference(f64),
    OneSidedDifference(f64),
}

impl fmt::Debug for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Analytic(_) => f.write_str("Analytic"),
            Self::CentralDifference(h) => write!(f, "CentralDifference({h})"),
            Self::OneSidedDifference(h) => write!(f, "OneSidedDifference({h})"),
        }
    }
}

/// A channel family `θ ↦ T_θ` evaluated around `theta0`.
#[derive(Clone)]
pub struct ParamChannel {
    dim: usize,
    theta0: f64,
    domain: (f64, f64),
    at: TransitionFn,
    mode: DerivativeMode,
    kraus: Option<KrausFn>,
    kraus_dot: Option<KrausDotFn>,
}

impl fmt::Debug for ParamChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamChannel")
            .field("dim", &self.dim)
            .field("theta0", &self.theta0)
            .field("domain", &self.domain)
            .field("mode", &self.mode)
            .field("has_kraus", &self.kraus.is_some())
            .finish()
    }
}

impl ParamChannel {
    pub fn new(dim: usize, theta0: f64, at: TransitionFn, mode: DerivativeMode) -> Self {
        Self {
            dim,
            theta0,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
            at,
            mode,
            kraus: None,
            kraus_dot: None,
        }
    }

    /// A θ-independent family.
    pub fn constant(t: TransitionMatrix, theta0: f64) -> Self {
        let dim = t.dim();
        let n = dim * dim;
        let t = Arc::new(t);
        Self::new(
            dim,
            theta0,
            Arc::new(move |_| Ok((*t).clone())),
            DerivativeMode::Analytic(Arc::new(move |_| Ok(CMatrix::zeros(n, n)))),
        )
    }

    /// A family given by Kraus operators; `T_θ` is built from them.
    pub fn from_kraus(dim: usize, theta0: f64, kraus: KrausFn, mode: DerivativeMode) -> Self {
        let k = kraus.clone();
        let mut pc = Self::new(
            dim,
            theta0,
            Arc::new(move |theta| Ok(k(theta)?.transition())),
            mode,
        );
        pc.kraus = Some(kraus);
        pc
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }

    pub fn with_kraus(mut self, kraus: KrausFn, kraus_dot: Option<KrausDotFn>) -> Self {
        self.kraus = Some(kraus);
        self.kraus_dot = kraus_dot;
        self
    }

    pub fn with_kraus_dot(mut self, kraus_dot: KrausDotFn) -> Self {
        self.kraus_dot = Some(kraus_dot);
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    /// The same family evaluated around a different `theta0`.
    pub fn recentered(&self, theta0: f64) -> Self {
        let mut pc = self.clone();
        pc.theta0 = theta0;
        pc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn mode(&self) -> &DerivativeMode {
        &self.mode
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if theta < lo || theta > hi || !theta.is_finite() {
            return Err(Error::DomainViolation {
                name: "theta".into(),
                value: theta,
                lo,
                hi,
            });
        }
        Ok(())
    }

    pub fn transition_at(&self, theta: f64) -> Result<TransitionMatrix> {
        self.check_domain(theta)?;
        let t = (self.at)(theta)?;
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.dim(),
            });
        }
        Ok(t)
    }

    /// `T` at `theta0`.
    pub fn transition(&self) -> Result<TransitionMatrix> {
        self.transition_at(self.theta0)
    }

    pub fn derivative(&self) -> Result<CMatrix> {
        derivative(self)
    }

    /// Kraus operators at `theta0`, when the family carries them.
    pub fn kraus(&self) -> Option<Result<KrausChannel>> {
        self.kraus.as_ref().map(|k| {
            self.check_domain(self.theta0)?;
            k(self.theta0)
        })
    }

    /// Kraus operator derivatives at `theta0`, when supplied.
    pub fn kraus_dot(&self) -> Option<Result<Vec<CMatrix>>> {
        self.kraus_dot.as_ref().map(|k| {
            self.check_domain(self.theta0)?;
            k(self.theta0)
        })
    }

    /// The family followed by a fixed control unitary: `(U ⊗ U*)·T_θ`.
    pub fn controlled(&self, u: &CMatrix) -> Result<Self> {
        check_unitary(u)?;
        if u.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.nrows(),
            });
        }
        let uu = Arc::new(unitary_transition(u));
        let inner = self.at.clone();
        let uu_t = uu.clone();
        let at: TransitionFn = Arc::new(move |theta| {
            let t = inner(theta)?;
            Ok(TransitionMatrix {
                dim: t.dim,
                t: &*uu_t * t.t,
            })
        });
        let mode = match &self.mode {
            DerivativeMode::Analytic(f) => {
                let f = f.clone();
                let uu_d = uu.clone();
                DerivativeMode::Analytic(Arc::new(move |theta| Ok(&*uu_d * f(theta)?)))
            }
            other => other.clone(),
        };
        let kraus = self.kraus.as_ref().map(|k| {
            let k = k.clone();
            let u = u.clone();
            Arc::new(move |theta| k(theta)?.then_unitary(&u)) as KrausFn
        });
        let kraus_dot = self.kraus_dot.as_ref().map(|k| {
            let k = k.clone();
            let u = u.clone();
            Arc::new(move |theta| Ok(k(theta)?.iter().map(|m| &u * m).collect())) as KrausDotFn
        });
        Ok(Self {
            dim: self.dim,
            theta0: self.theta0,
            domain: self.domain,
            at,
            mode,
            kraus,
            kraus_dot,
        })
    }
}

/// `Ṫ` at `theta0` according to the family's derivative mode.
pub fn derivative(pc: &ParamChannel) -> Result<CMatrix> {
    let th = pc.theta0;
    pc.check_domain(th)?;
    match &pc.mode {
        DerivativeMode::Analytic(f) => {
            let d = f(th)?;
            let n = pc.dim * pc.dim;
            if d.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    found: d.shape(),
                });
            }
            Ok(d)
        }
        DerivativeMode::CentralDifference(h) => {
            let plus = pc.transition_at(th + h)?;
            let minus = pc.transition_at(th - h)?;
            Ok((plus.t - minus.t).unscale(2.0 * h))
        }
        DerivativeMode::OneSidedDifference(h) => {
            let plus = pc.transition_at(th + h)?;
            let here = pc.transition_at(th)?;
            Ok((plus.t - here.t).unscale(*h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(i, j)] = c64(1., 0.);
        m
    }

    #[test]
    fn row_major_vectorization() {
        let v = vectorize(&DensityMatrix::maximally_mixed(2).into_matrix());
        assert_eq!(v.as_slice(), &[c64(0.5, 0.), c64(0., 0.), c64(0., 0.), c64(0.5, 0.)]);
        let v = vectorize(&ket_bra(2, 0, 1));
        assert_eq!(v.as_slice(), &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
        let back = unvectorize(&v, 2).unwrap();
        assert_eq!(back, ket_bra(2, 0, 1));
    }

    #[test]
    fn kron_convention_matches_kraus_action() {
        // (A ⊗ B*) vec(X) = vec(A X B†) is what makes T = Σ K ⊗ K* work.
        let k = CMatrix::from_row_slice(2, 2, &[c64(0.6, 0.), c64(0., 0.8), c64(0., 0.), c64(0.3, -0.1)]);
        let x = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(2., 1.), c64(-1., 0.5), c64(0., 3.)]);
        let lhs = unitary_transition(&k) * vectorize(&x);
        let rhs = vectorize(&(&k * &x * k.adjoint()));
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let k = identity(2).scale(0.9);
        assert!(matches!(KrausChannel::new(vec![k]), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn transpose_map_is_not_cp() {
        // T|X⟩⟩ = |Xᵀ⟩⟩ is trace preserving but not completely positive.
        let mut t = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                t[(j * 2 + i, i * 2 + j)] = c64(1., 0.);
            }
        }
        assert!(TransitionMatrix::new(t.clone()).is_ok());
        assert!(matches!(
            TransitionMatrix::from_untrusted(t),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn non_square_side_rejected() {
        assert!(TransitionMatrix::new(identity(3)).is_err());
    }

    #[test]
    fn control_is_applied_after_channel() {
        let x = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        let t = compose_control(&TransitionMatrix::identity(2), &x).unwrap();
        assert!(fro(&(t.matrix() - kron(&x, &conj(&x)))) < 1e-15);
        assert!(matches!(
            compose_control(&TransitionMatrix::identity(2), &identity(2).scale(2.0)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn difference_modes_respect_domain() {
        let t = TransitionMatrix::identity(2);
        let pc = ParamChannel::constant(t.clone(), 0.0)
            .with_mode(DerivativeMode::CentralDifference(1e-6))
            .with_domain(0.0, 1.0);
        assert!(matches!(derivative(&pc), Err(Error::DomainViolation { .. })));
        let pc = pc.with_mode(DerivativeMode::OneSidedDifference(1e-7));
        assert!(fro(&derivative(&pc).unwrap()) == 0.0);
    }

    #[test]
    fn state_validation() {
        assert!(DensityMatrix::new(identity(2)).is_err());
        assert!(DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[c64(1.5, 0.), c64(0., 0.), c64(0., 0.), c64(-0.5, 0.)]
        ))
        .is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(3).into_matrix()).is_ok());
    }
}
