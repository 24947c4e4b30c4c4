//! Search for a unitary control `U_c` with `U_c†·R·U_c = Φ(R)` for the
//! Hermitian parts `R` of a signal eigenmatrix, by matching the relative
//! geometry of their eigenspaces.

use std::collections::VecDeque;

use crate::channels::{compose_control, unvectorize, vectorize, KrausChannel, ParamChannel, TransitionMatrix};
use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, procrustes, svd, CMatrix, CVector, C64};
use crate::spectral::peripheral_spectrum;
use crate::tolerances::Tolerances;

/// A subspace given by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMatrix,
    projection: CMatrix,
}

impl Subspace {
    /// Orthonormalizes the given columns, keeping directions above `1e-10`
    /// relative to the largest.
    pub fn from_columns(cols: &CMatrix) -> Result<Self> {
        let basis = crate::numerics::orthonormal_span(cols, 1e-10)?;
        Ok(Self::from_orthonormal(basis))
    }

    fn from_orthonormal(basis: CMatrix) -> Self {
        let projection = &basis * basis.adjoint();
        Self { basis, projection }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projection(&self) -> &CMatrix {
        &self.projection
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// `(R₀ + R₀†, i(R₀ − R₀†))`.
pub fn hermitian_split(r0: &CMatrix) -> (CMatrix, CMatrix) {
    let adj = r0.adjoint();
    (r0 + &adj, (r0 - adj) * C64::i())
}

/// Eigenspaces of a Hermitian matrix, one per eigenvalue cluster (absolute
/// gap `group_tol`), in descending eigenvalue order. The kernel is kept.
pub fn spectral_subspaces(h: &CMatrix, group_tol: f64) -> Result<Vec<Subspace>> {
    let (w, v) = eig_hermitian(h)?;
    let n = w.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (w[end - 1] - w[end]).abs() <= group_tol {
            end += 1;
        }
        let cols: Vec<CVector> = (start..end).map(|j| v.column(j).into_owned()).collect();
        out.push(Subspace::from_orthonormal(CMatrix::from_columns(&cols)));
        start = end;
    }
    Ok(out)
}

/// One split performed by [`refine_subspaces`].
#[derive(Debug, Clone, PartialEq)]
pub struct RefineStep {
    pub round: usize,
    pub pair: (usize, usize),
    pub singular_values: Vec<f64>,
    pub count_after: usize,
}

const ORTHOGONAL: f64 = 1e-9;

/// Singular values of `Π_a·Π_b`, descending.
fn overlap_singular_values(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    Ok(svd(&(a.basis.adjoint() * &b.basis))?.singular_values)
}

/// Whether the pair is already in canonical relative position: orthogonal,
/// or of equal dimension with all singular values of `Π_a·Π_b` equal.
fn compatible(a: &Subspace, b: &Subspace, tol: &Tolerances) -> Result<bool> {
    let s = overlap_singular_values(a, b)?;
    if s[0] <= ORTHOGONAL {
        return Ok(true);
    }
    if a.dim() != b.dim() {
        return Ok(false);
    }
    Ok(s.iter().all(|&x| (x - s[0]).abs() <= tol.subspace_group))
}

/// Splits a non-compatible pair by principal angles. Returns the pieces of
/// `a` and of `b`.
fn split_pair(a: &Subspace, b: &Subspace, tol: &Tolerances) -> Result<(Vec<Subspace>, Vec<Subspace>)> {
    let c = a.basis.adjoint() * &b.basis;
    let s = svd(&c)?;
    let left = &a.basis * &s.u;
    let right = &b.basis * &s.v;
    let k = s.singular_values.len();
    let nonzero: Vec<usize> = (0..k).filter(|&i| s.singular_values[i] > tol.singular_nonzero).collect();

    // Group nonzero singular values, ascending.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in nonzero.iter().rev() {
        match groups.last_mut() {
            Some(g) if (s.singular_values[g[0]] - s.singular_values[i]).abs() <= tol.subspace_group => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let cols = |m: &CMatrix, idx: &[usize]| -> CMatrix {
        CMatrix::from_columns(&idx.iter().map(|&i| m.column(i).into_owned()).collect::<Vec<_>>())
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for g in &groups {
        xs.push(Subspace::from_orthonormal(cols(&left, g)));
        if (s.singular_values[g[0]] - 1.0).abs() > tol.singular_nonzero {
            ys.push(Subspace::from_orthonormal(cols(&right, g)));
        }
    }
    if let Some(rest) = complement(a, &cols(&left, &nonzero)) {
        xs.push(rest);
    }
    if let Some(rest) = complement(b, &cols(&right, &nonzero)) {
        ys.push(rest);
    }
    Ok((xs, ys))
}

/// Orthogonal complement of `used` (orthonormal columns) inside `space`.
fn complement(space: &Subspace, used: &CMatrix) -> Option<Subspace> {
    let extra = space.dim() - used.ncols();
    if extra == 0 {
        return None;
    }
    let residual = &space.basis - used * (used.adjoint() * &space.basis);
    let s = svd(&residual).ok()?;
    Some(Subspace::from_orthonormal(s.u.columns(0, extra).into_owned()))
}

fn same_projection(a: &Subspace, b: &Subspace) -> bool {
    a.dim() == b.dim() && (&a.projection - &b.projection).norm() <= 1e-8
}

/// Splits subspaces until every pair is orthogonal or of equal dimension with
/// a single common nonzero singular value of `Π_a·Π_b`.
///
/// The first offending pair is split each round; its pieces replace it in
/// place, and duplicated subspaces are dropped.
pub fn refine_subspaces(subspaces: Vec<Subspace>, tol: &Tolerances) -> Result<(Vec<Subspace>, Vec<RefineStep>)> {
    let mut list = dedup(subspaces);
    let mut trace = Vec::new();
    for round in 0..tol.refine_max_rounds {
        let mut offending = None;
        'search: for i in 0..list.len() {
            for j in i + 1..list.len() {
                if !compatible(&list[i], &list[j], tol)? {
                    offending = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((i, j)) = offending else {
            return Ok((list, trace));
        };
        let singular_values = overlap_singular_values(&list[i], &list[j])?;
        let (xs, ys) = split_pair(&list[i], &list[j], tol)?;
        let mut next = Vec::with_capacity(list.len() + xs.len() + ys.len());
        for (k, s) in list.into_iter().enumerate() {
            if k == i {
                next.extend(xs.iter().cloned());
            } else if k == j {
                next.extend(ys.iter().cloned());
            } else {
                next.push(s);
            }
        }
        list = dedup(next);
        trace.push(RefineStep {
            round,
            pair: (i, j),
            singular_values,
            count_after: list.len(),
        });
    }
    Err(Error::NoConvergence {
        rounds: tol.refine_max_rounds,
    })
}

fn dedup(list: Vec<Subspace>) -> Vec<Subspace> {
    let mut out: Vec<Subspace> = Vec::with_capacity(list.len());
    for s in list {
        if !out.iter().any(|o| same_projection(o, &s)) {
            out.push(s);
        }
    }
    out
}

/// Basis of a seed subspace: its projections of the coordinate axes, in index
/// order, orthonormalized.
fn seed_basis(s: &Subspace) -> CMatrix {
    let n = s.projection.nrows();
    let mut vs: Vec<CVector> = Vec::new();
    for k in 0..n {
        if vs.len() == s.dim() {
            break;
        }
        let mut v = s.projection.column(k).into_owned();
        for u in &vs {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            vs.push(v.unscale(norm));
        }
    }
    CMatrix::from_columns(&vs)
}

/// Bases for all subspaces, fixed by breadth-first propagation from a seed
/// in each connected group of non-orthogonal subspaces. A neighbour `Q` of
/// an established subspace with basis `Ũ` gets `Ṽ = Π_Q·Ũ / s`, `s` the common
/// singular value. Vectors are returned in the order subspaces were reached.
pub fn canonical_order(subspaces: &[Subspace]) -> Result<Vec<CVector>> {
    let n = subspaces.len();
    let mut done: Vec<Option<CMatrix>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if done[seed].is_some() {
            continue;
        }
        done[seed] = Some(seed_basis(&subspaces[seed]));
        order.push(seed);
        let mut queue = VecDeque::from([seed]);
        while let Some(a) = queue.pop_front() {
            let ua = done[a].clone().expect("established");
            for b in 0..n {
                if done[b].is_some() {
                    continue;
                }
                let sv = svd(&(ua.adjoint() * &subspaces[b].basis))?.singular_values;
                if sv[0] <= ORTHOGONAL {
                    continue;
                }
                if subspaces[b].dim() != ua.ncols() {
                    return Err(Error::AlgorithmInvariantViolated(format!(
                        "linked subspaces {a} and {b} have dimensions {} and {}",
                        ua.ncols(),
                        subspaces[b].dim()
                    )));
                }
                let vb = (&subspaces[b].projection * &ua).unscale(sv[0]);
                let k = vb.ncols();
                let res = (vb.adjoint() * &vb - CMatrix::identity(k, k)).norm();
                if res > 1e-6 {
                    return Err(Error::AlgorithmInvariantViolated(format!(
                        "propagated basis of subspace {b} is not orthonormal (residual {res:.3e})"
                    )));
                }
                done[b] = Some(vb);
                order.push(b);
                queue.push_back(b);
            }
        }
    }
    Ok(order
        .into_iter()
        .flat_map(|i| {
            let m = done[i].take().expect("established");
            m.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()
        })
        .collect())
}

/// Record of one list's decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ListTrace {
    pub initial_subspaces: usize,
    pub refine_steps: Vec<RefineStep>,
    pub final_subspaces: usize,
    pub vectors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisTrace {
    pub input: ListTrace,
    pub output: ListTrace,
}

#[derive(Debug, Clone)]
pub struct ControlSolution {
    pub u_c: CMatrix,
    /// `max_i ‖U_c†R_iU_c − Φ(R_i)‖ / max(1, ‖R_i‖)`.
    pub sanity_residual: f64,
    pub succeeded: bool,
    pub trace: SynthesisTrace,
}

fn decompose(list: &[CMatrix], tol: &Tolerances) -> Result<(CMatrix, ListTrace)> {
    let mut subs = Vec::new();
    for r in list {
        subs.extend(spectral_subspaces(r, tol.subspace_group)?);
    }
    let initial = subs.len();
    let (refined, steps) = refine_subspaces(subs, tol)?;
    let vectors = canonical_order(&refined)?;
    let trace = ListTrace {
        initial_subspaces: initial,
        refine_steps: steps,
        final_subspaces: refined.len(),
        vectors: vectors.len(),
    };
    Ok((CMatrix::from_columns(&vectors), trace))
}

/// Runs the search with an arbitrary channel action `Φ`.
pub fn synthesize_with_map(
    r0: &CMatrix,
    map: impl Fn(&CMatrix) -> Result<CMatrix>,
    tol: &Tolerances,
) -> Result<ControlSolution> {
    if !r0.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (r0.nrows(), r0.nrows()),
            found: r0.shape(),
        });
    }
    let (r1, r2) = hermitian_split(r0);
    let ins = [r1, r2];
    let outs = [map(&ins[0])?, map(&ins[1])?];
    let (m1, t_in) = decompose(&ins, tol)?;
    let (m2, t_out) = decompose(&outs, tol)?;
    if m1.shape() != m2.shape() {
        return Err(Error::AlgorithmInvariantViolated(format!(
            "input and output lists yield {} and {} canonical vectors",
            m1.ncols(),
            m2.ncols()
        )));
    }
    let u_c = procrustes(&m1, &m2)?;
    let sanity_residual = ins
        .iter()
        .zip(&outs)
        .map(|(r, o)| (u_c.adjoint() * r * &u_c - o).norm() / r.norm().max(1.0))
        .fold(0.0, f64::max);
    Ok(ControlSolution {
        u_c,
        sanity_residual,
        succeeded: sanity_residual <= tol.sanity,
        trace: SynthesisTrace {
            input: t_in,
            output: t_out,
        },
    })
}

/// Control search for a Kraus channel at θ₀.
pub fn synthesize_control(ch: &KrausChannel, r0: &CMatrix) -> Result<ControlSolution> {
    synthesize_control_with(ch, r0, &Tolerances::default())
}

pub fn synthesize_control_with(ch: &KrausChannel, r0: &CMatrix, tol: &Tolerances) -> Result<ControlSolution> {
    check_dim(ch.dim(), r0)?;
    synthesize_with_map(r0, |x| Ok(ch.apply(x)), tol)
}

/// Control search using the action of a transition matrix.
pub fn synthesize_control_transition(t: &TransitionMatrix, r0: &CMatrix, tol: &Tolerances) -> Result<ControlSolution> {
    check_dim(t.dim(), r0)?;
    synthesize_with_map(r0, |x| t.apply(x), tol)
}

fn check_dim(d: usize, r0: &CMatrix) -> Result<()> {
    if r0.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: r0.shape(),
        });
    }
    Ok(())
}

/// Checks `T|R_i⟩⟩ = (U_c†⊗U_cᵀ)|R_i⟩⟩` for both Hermitian parts of `r0` and
/// that the controlled channel has a moving peripheral eigenvalue.
pub fn verify_control(pc: &ParamChannel, u_c: &CMatrix, r0: &CMatrix) -> bool {
    verify_control_with(pc, u_c, r0, &Tolerances::default())
}

pub fn verify_control_with(pc: &ParamChannel, u_c: &CMatrix, r0: &CMatrix, tol: &Tolerances) -> bool {
    let d = pc.dim();
    if u_c.shape() != (d, d) || r0.shape() != (d, d) {
        return false;
    }
    let Ok(t) = pc.transition() else {
        return false;
    };
    let (r1, r2) = hermitian_split(r0);
    for r in [r1, r2] {
        let lhs = t.matrix() * vectorize(&r);
        let rhs = vectorize(&(u_c.adjoint() * &r * u_c));
        if (lhs - rhs).norm() > 1e-8 * r.norm().max(1.0) {
            return false;
        }
    }
    if compose_control(&t, u_c).is_err() {
        return false;
    }
    let Ok(controlled) = pc.controlled(u_c) else {
        return false;
    };
    match peripheral_spectrum(&controlled, tol) {
        Ok(spec) => spec
            .entries
            .iter()
            .any(|e| e.lambda_dot.is_some_and(|v| v.norm() > tol.nonzero_derivative)),
        Err(_) => false,
    }
}

/// `U_c` maps the vectorized eigenmatrix onto the channel image. Exposed for
/// reports.
pub fn equivalence_residual(t: &TransitionMatrix, u_c: &CMatrix, r: &CMatrix) -> Result<f64> {
    let lhs = unvectorize(&(t.matrix() * vectorize(r)), t.dim())?;
    Ok((lhs - u_c.adjoint() * r * u_c).norm())
}
