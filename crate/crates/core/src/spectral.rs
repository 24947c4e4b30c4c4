//! Peripheral spectrum of a transition matrix and expansion of input states
//! on its peripheral eigenvectors.

use crate::channels::{unvectorize, vectorize, DensityMatrix, ParamChannel, TransitionMatrix};
use crate::error::{Error, Result};
use crate::numerics::{
    eig_general_with, eig_hermitian, eigenspace, fix_phase_vector, hermitian_part, identity,
    orthonormal_span, trace, CMatrix, CVector, EigPair, C64,
};
use crate::tolerances::Tolerances;

/// One peripheral eigenvalue with its eigenvector pair.
#[derive(Debug, Clone)]
pub struct PeripheralEntry {
    pub lambda: C64,
    /// `None` when the derivative could not be resolved inside a degenerate
    /// cluster.
    pub lambda_dot: Option<C64>,
    /// Unit-norm right eigenvector `|R⟩⟩`.
    pub right: CVector,
    /// Left eigenvector with `left†·right = 1`.
    pub left: CVector,
    pub is_fixed_point: bool,
    /// Index into [`PeripheralSpectrum::groups`].
    pub group: usize,
}

impl PeripheralEntry {
    /// The right eigenvector as a `d × d` matrix.
    pub fn eigenmatrix(&self, d: usize) -> CMatrix {
        CMatrix::from_row_slice(d, d, self.right.as_slice())
    }
}

/// Entries sharing the same eigenvalue and the same first-order derivative.
#[derive(Debug, Clone)]
pub struct SpectralGroup {
    pub value: C64,
    pub rate: Option<C64>,
    pub members: Vec<usize>,
    /// The group is an entire eigenvalue cluster of `T`, so its spectral
    /// projector is differentiable and its derivative is available.
    pub whole_cluster: bool,
}

#[derive(Debug, Clone)]
pub struct PeripheralSpectrum {
    pub dim: usize,
    pub entries: Vec<PeripheralEntry>,
    pub groups: Vec<SpectralGroup>,
    pub tolerance_used: f64,
    /// Eigenvalues just inside the unit circle, where finite-N behaviour can
    /// differ from the asymptotics.
    pub near_peripheral: Vec<C64>,
    pub warnings: Vec<String>,
    pub(crate) t: CMatrix,
    pub(crate) t_dot: CMatrix,
}

impl PeripheralSpectrum {
    pub fn transition(&self) -> &CMatrix {
        &self.t
    }

    pub fn transition_dot(&self) -> &CMatrix {
        &self.t_dot
    }

    /// Gram matrix `⟨⟨R_i|R_j⟩⟩` of the right eigenvectors.
    pub fn gram(&self) -> CMatrix {
        let k = self.entries.len();
        CMatrix::from_fn(k, k, |i, j| {
            self.entries[i].right.dotc(&self.entries[j].right)
        })
    }

    /// Spectral projector `Σ |R_i⟩⟩⟨⟨L_i|` of one group.
    pub fn group_projector(&self, g: usize) -> CMatrix {
        let n = self.t.nrows();
        self.groups[g]
            .members
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, &i| {
                acc + &self.entries[i].right * self.entries[i].left.adjoint()
            })
    }
}

/// Coefficients of `|ρ₀⟩⟩` on the peripheral eigenvectors.
#[derive(Debug, Clone)]
pub struct StateExpansion {
    pub coefficients: Vec<C64>,
    /// `|ρ₀⟩⟩ − Σ a_i|R_i⟩⟩`.
    pub remainder: CVector,
    pub residual: f64,
}

/// All eigenvalues of `T(θ₀)` with `|λ| ≥ 1 − tol.peripheral`, with
/// eigenvectors and eigenvalue derivatives.
///
/// Inside a degenerate cluster the basis is chosen to diagonalize the
/// restriction `L†·Ṫ·R` of the derivative, whose eigenvalues are the
/// derivatives of the branches leaving the cluster. Fixed-point and other
/// real sub-clusters get a Hermitian orthonormal basis, the fixed point
/// first.
pub fn peripheral_spectrum(pc: &ParamChannel, tol: &Tolerances) -> Result<PeripheralSpectrum> {
    let t = pc.transition()?;
    let t_dot = pc.derivative()?;
    spectrum_from_matrices(t.dim(), t.into_matrix(), t_dot, tol)
}

pub(crate) fn spectrum_from_matrices(
    d: usize,
    t: CMatrix,
    t_dot: CMatrix,
    tol: &Tolerances,
) -> Result<PeripheralSpectrum> {
    let pairs = eig_general_with(&t, tol.eig_cluster)?;
    let cutoff = 1.0 - tol.peripheral;
    let mut warnings = Vec::new();
    let mut near_peripheral = Vec::new();
    for p in &pairs {
        let gap = 1.0 - p.value.norm();
        if gap > tol.peripheral && gap < tol.near_peripheral {
            near_peripheral.push(p.value);
        }
    }
    if !near_peripheral.is_empty() {
        warnings.push(format!(
            "{} eigenvalue(s) lie within {:.0e} of the unit circle without being peripheral; \
             finite-N behaviour may differ from the asymptotics",
            near_peripheral.len(),
            tol.near_peripheral
        ));
    }

    let mut clusters: Vec<Vec<&EigPair>> = Vec::new();
    for p in pairs.iter().filter(|p| p.value.norm() >= cutoff) {
        match clusters.iter_mut().find(|c| c[0].cluster == p.cluster) {
            Some(c) => c.push(p),
            None => clusters.push(vec![p]),
        }
    }

    let mut entries = Vec::new();
    let mut groups = Vec::new();
    for members in clusters {
        let k = members.len();
        let mu = members.iter().map(|p| p.value).sum::<C64>() / k as f64;
        let space = eigenspace(&t, mu, k)?;
        if !space.semisimple || space.right.ncols() != k {
            return Err(Error::DegenerateUnresolved {
                value: format!("{mu:.6}"),
                reason: "peripheral eigenvalue is not semisimple at this tolerance".into(),
            });
        }
        resolve_cluster(d, &t, &t_dot, mu, space.right, space.left, tol, &mut entries, &mut groups)?;
    }

    // Fixed points first, otherwise keep the eigenvalue order.
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&i| !entries[i].is_fixed_point);
    let mut remap = vec![0; entries.len()];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let entries: Vec<PeripheralEntry> = order.iter().map(|&i| entries[i].clone()).collect();
    for g in &mut groups {
        for m in &mut g.members {
            *m = remap[*m];
        }
        g.members.sort_unstable();
    }

    Ok(PeripheralSpectrum {
        dim: d,
        entries,
        groups,
        tolerance_used: tol.peripheral,
        near_peripheral,
        warnings,
        t,
        t_dot,
    })
}

#[allow(clippy::too_many_arguments)]
fn resolve_cluster(
    d: usize,
    t: &CMatrix,
    t_dot: &CMatrix,
    mu: C64,
    right: CMatrix,
    left: CMatrix,
    tol: &Tolerances,
    entries: &mut Vec<PeripheralEntry>,
    groups: &mut Vec<SpectralGroup>,
) -> Result<()> {
    let restricted = left.adjoint() * t_dot * &right;
    let sub_pairs = eig_general_with(&restricted, tol.eig_cluster)?;
    let mut sub_ids: Vec<usize> = Vec::new();
    for p in &sub_pairs {
        if !sub_ids.contains(&p.cluster) {
            sub_ids.push(p.cluster);
        }
    }
    let whole_cluster = sub_ids.len() == 1;
    let one = C64::new(1.0, 0.0);
    let near = |a: C64, b: C64| (a - b).norm() <= tol.fixed_point.max(tol.eig_cluster);

    for cid in sub_ids {
        let members: Vec<&EigPair> = sub_pairs.iter().filter(|p| p.cluster == cid).collect();
        let s = members.len();
        let nu = members.iter().map(|p| p.value).sum::<C64>() / s as f64;
        let (rc, lc, resolved) = if whole_cluster {
            // A single non-scalar block means the branches split faster
            // than linearly, so there is no first-order derivative.
            let k = restricted.nrows();
            let scalar = (&restricted - CMatrix::identity(k, k) * nu).norm()
                <= tol.eig_cluster * restricted.norm().max(1.0);
            (right.clone(), left.clone(), scalar)
        } else {
            let ms = eigenspace(&restricted, nu, s)?;
            if ms.semisimple && ms.right.ncols() == s {
                (&right * &ms.right, &left * &ms.left, true)
            } else {
                // The derivative does not split this part of the cluster
                // into branches at first order.
                let basis = orthonormal_span(&(&right * &ms.right), 1e-10)?;
                let lc = rebase_left(&left, &basis).unwrap_or_else(|| left.clone());
                (basis, lc, false)
            }
        };

        let real = mu.im.abs() <= tol.eig_cluster && nu.im.abs() <= tol.eig_cluster;
        let seed = near(mu, one) && nu.norm() <= tol.eig_cluster.max(tol.nonzero_derivative);
        let hermitian = if real {
            hermitian_basis(d, &rc, &lc, seed)
        } else {
            None
        };
        let (rc, lc, is_hermitian) = match hermitian {
            Some((r, l)) => (r, l, true),
            None => (rc, lc, false),
        };

        let g = groups.len();
        let mut member_ids = Vec::new();
        for j in 0..rc.ncols() {
            let mut r = rc.column(j).into_owned();
            let mut l = lc.column(j).into_owned();
            let n = r.norm();
            r.unscale_mut(n);
            l.scale_mut(n);
            if !is_hermitian && rc.ncols() == 1 {
                let before = r.clone();
                fix_phase_vector(&mut r);
                l *= before.dotc(&r);
            }
            let overlap = l.dotc(&r);
            l = l.map(|z| z / overlap.conj());
            let lambda = l.dotc(&(t * &r));
            let lambda_dot = resolved.then(|| l.dotc(&(t_dot * &r)));
            let is_fixed_point = near(lambda, one) && proportional_to_state(&unvectorize(&r, d)?);
            member_ids.push(entries.len());
            entries.push(PeripheralEntry {
                lambda,
                lambda_dot,
                right: r,
                left: l,
                is_fixed_point,
                group: g,
            });
        }
        groups.push(SpectralGroup {
            value: mu,
            rate: resolved.then_some(nu),
            members: member_ids,
            whole_cluster,
        });
    }
    Ok(())
}

/// Left basis dual to `new_right`, a basis of the span of the cluster whose
/// biorthogonal pair is (`right`, `left`).
fn rebase_left(left: &CMatrix, new_right: &CMatrix) -> Option<CMatrix> {
    let c = left.adjoint() * new_right;
    let ci = c.try_inverse()?;
    Some(left * ci.adjoint())
}

/// Orthonormal (Hilbert–Schmidt) basis of Hermitian matrices spanning the
/// same space as the columns of `rc`, seeded with the state obtained by
/// projecting `I/d` onto that space when `seed_state` is set.
///
/// Returns `None` when the span is not closed under the adjoint.
fn hermitian_basis(
    d: usize,
    rc: &CMatrix,
    lc: &CMatrix,
    seed_state: bool,
) -> Option<(CMatrix, CMatrix)> {
    let s = rc.ncols();
    let mut candidates: Vec<CVector> = Vec::new();
    if seed_state {
        let proj = rc * lc.adjoint();
        let v = &proj * vectorize(&identity(d).unscale(d as f64));
        let m = hermitian_part(&unvectorize(&v, d).ok()?);
        if trace(&m).re > 1e-8 {
            candidates.push(vectorize(&m));
        }
    }
    for j in 0..s {
        let m = unvectorize(&rc.column(j).into_owned(), d).ok()?;
        let re = hermitian_part(&m);
        let im = (&m - m.adjoint()).map(|z| z * C64::new(0.0, -0.5));
        candidates.push(vectorize(&re));
        candidates.push(vectorize(&im));
    }
    let mut basis: Vec<CVector> = Vec::new();
    for c in candidates {
        if basis.len() == s {
            break;
        }
        let scale = c.norm();
        if scale < 1e-12 {
            continue;
        }
        let mut x = c;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&x);
                x -= b * proj;
            }
        }
        if x.norm() > 1e-6 * scale {
            x.unscale_mut(x.norm());
            basis.push(x);
        }
    }
    if basis.len() < s {
        return None;
    }
    for b in &mut basis {
        fix_sign(b);
    }
    let b = CMatrix::from_columns(&basis);
    // Every basis vector must lie in the cluster span.
    let back = rc * (lc.adjoint() * &b);
    if (&back - &b).norm() > 1e-8 {
        return None;
    }
    let l = rebase_left(lc, &b)?;
    Some((b, l))
}

/// Flips the sign of a Hermitian eigenmatrix so its first largest entry has
/// positive real part (positive imaginary part when that entry is imaginary).
fn fix_sign(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(p) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let key = if p.re.abs() > 1e-12 * max { p.re } else { p.im };
        if key < 0.0 {
            v.neg_mut();
        }
    }
}

fn proportional_to_state(m: &CMatrix) -> bool {
    let tr = trace(m);
    if tr.norm() < 1e-8 {
        return false;
    }
    let x = m.map(|z| z / tr);
    let scale = x.norm().max(1.0);
    if (&x - x.adjoint()).norm() > 1e-8 * scale {
        return false;
    }
    match eig_hermitian(&hermitian_part(&x)) {
        Ok((w, _)) => w.last().is_some_and(|&v| v >= -1e-8 * scale),
        Err(_) => false,
    }
}

/// `λ̇ = left†·Ṫ·right / left†·right` for a simple eigenvalue.
pub fn eigenvalue_derivative(pc: &ParamChannel, pair: &EigPair) -> Result<C64> {
    let left = pair.left.as_ref().ok_or_else(|| Error::DegenerateUnresolved {
        value: format!("{:.6}", pair.value),
        reason: format!(
            "eigenvalue belongs to a cluster of {}; use the restricted-block derivatives of \
             peripheral_spectrum",
            pair.cluster_size
        ),
    })?;
    let t_dot = pc.derivative()?;
    Ok(left.dotc(&(t_dot * &pair.right)) / left.dotc(&pair.right))
}

/// Finite-difference estimate of `λ̇` by following the eigenvalue of
/// `T(θ₀ ± h)` nearest to `value`.
pub fn tracked_eigenvalue_derivative(pc: &ParamChannel, value: C64, h: f64) -> Result<C64> {
    let nearest = |theta: f64| -> Result<C64> {
        let t = pc.transition_at(theta)?;
        let pairs = crate::numerics::eig_general(t.matrix())?;
        Ok(pairs
            .iter()
            .map(|p| p.value)
            .min_by(|a, b| (a - value).norm().total_cmp(&(b - value).norm()))
            .expect("non-empty spectrum"))
    };
    // a side the family cannot evaluate falls back to a one-sided difference
    let th = pc.theta0();
    match (nearest(th + h), nearest(th - h)) {
        (Ok(up), Ok(down)) => Ok((up - down) / (2.0 * h)),
        (Ok(up), Err(_)) => Ok((up - nearest(th)?) / h),
        (Err(_), Ok(down)) => Ok((nearest(th)? - down) / h),
        (Err(e), Err(_)) => Err(e),
    }
}

/// The state obtained by projecting `I/d` onto the eigenvalue-1 eigenspace.
pub fn fixed_point(t: &TransitionMatrix) -> Result<DensityMatrix> {
    fixed_point_with(t, &Tolerances::default())
}

pub fn fixed_point_with(t: &TransitionMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    let d = t.dim();
    let pairs = eig_general_with(t.matrix(), tol.eig_cluster)?;
    let one = C64::new(1.0, 0.0);
    let at_one = pairs
        .iter()
        .find(|p| (p.value - one).norm() <= tol.fixed_point.max(tol.eig_cluster))
        .ok_or_else(|| Error::AlgorithmInvariantViolated("no eigenvalue equal to 1".into()))?;
    let k = at_one.cluster_size;
    let mean = pairs
        .iter()
        .filter(|p| p.cluster == at_one.cluster)
        .map(|p| p.value)
        .sum::<C64>()
        / k as f64;
    let space = eigenspace(t.matrix(), mean, k)?;
    let proj = &space.right * space.left.adjoint();
    let v = proj * vectorize(&identity(d).unscale(d as f64));
    let m = hermitian_part(&unvectorize(&v, d)?);
    let tr = trace(&m).re;
    if tr <= 0.0 {
        return Err(Error::AlgorithmInvariantViolated(
            "projected fixed point has non-positive trace".into(),
        ));
    }
    DensityMatrix::with_tolerance(m.unscale(tr), 1e-9)
}

/// `a_i = left_i†·|ρ₀⟩⟩`.
pub fn expand_state(spec: &PeripheralSpectrum, rho0: &DensityMatrix) -> Result<StateExpansion> {
    if rho0.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: rho0.dim(),
        });
    }
    let v = rho0.vectorize();
    let coefficients: Vec<C64> = spec.entries.iter().map(|e| e.left.dotc(&v)).collect();
    let peripheral = spec
        .entries
        .iter()
        .zip(&coefficients)
        .fold(CVector::zeros(v.len()), |acc, (e, &a)| acc + &e.right * a);
    let remainder = v - peripheral;
    let residual = remainder.norm();
    Ok(StateExpansion {
        coefficients,
        remainder,
        residual,
    })
}

/// `Σ a_i λ_i^n |R_i⟩⟩`: the peripheral part of `Tⁿ|ρ₀⟩⟩`.
pub fn asymptotic_state(spec: &PeripheralSpectrum, exp: &StateExpansion, n: u64) -> CVector {
    let len = spec.t.nrows();
    spec.entries
        .iter()
        .zip(&exp.coefficients)
        .fold(CVector::zeros(len), |acc, (e, &a)| {
            acc + &e.right * (a * e.lambda.powu(n as u32))
        })
}
