//! Sufficient conditions for Heisenberg scaling, each returning the objects
//! that witness it.

use crate::channels::{unitality_check, unvectorize, DensityMatrix, KrausChannel, ParamChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    eig_general_with, eig_hermitian, eigenspace, identity, is_finite, svd, trace, CMatrix,
    CVector, C64,
};
use crate::spectral::{peripheral_spectrum, PeripheralSpectrum};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlStatus {
    Achievable,
    /// The sufficient condition does not hold. Heisenberg scaling may still
    /// be reachable by other means.
    NotDetected,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct HlWitness {
    /// Index into the peripheral spectrum entries.
    pub index: usize,
    pub lambda: C64,
    pub lambda_dot: C64,
    pub input_state: DensityMatrix,
}

#[derive(Debug, Clone)]
pub struct HlVerdict {
    pub status: HlStatus,
    pub witness: Option<HlWitness>,
    pub diagnostics: Vec<String>,
}

impl HlVerdict {
    fn inconclusive(msg: impl Into<String>) -> Self {
        Self {
            status: HlStatus::Inconclusive,
            witness: None,
            diagnostics: vec![msg.into()],
        }
    }
}

/// Default weight of the fixed point in the orthogonal-eigenvector witness state.
pub const FIXED_POINT_WEIGHT: f64 = 0.5;
/// Upper end of the search interval for the eigenmatrix weight.
pub const MAX_SIGNAL_WEIGHT: f64 = 0.25;

/// `e^{−iγ}R` when it is Hermitian for some phase γ, read off from
/// `Tr R² = e^{2iγ}‖R‖²`.
pub fn hermitian_representative(r: &CMatrix, tol: f64) -> Option<CMatrix> {
    let norm = r.norm();
    if norm == 0.0 {
        return None;
    }
    let tr2 = trace(&(r * r));
    if tr2.norm() <= tol * norm * norm {
        return None;
    }
    let h = r * C64::from_polar(1.0, -tr2.arg() / 2.0);
    ((&h - h.adjoint()).norm() <= tol * norm).then_some(h)
}

/// `R + R†`, using the Hermitian representative of `R` when there is one so
/// the sum cannot cancel.
fn signal_direction(r: &CMatrix, tol: f64) -> CMatrix {
    match hermitian_representative(r, tol) {
        Some(h) => h.scale(2.0),
        None => r + r.adjoint(),
    }
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    eig_hermitian(m)
        .map(|(w, _)| w.iter().cloned().fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Largest `x ∈ (0, MAX_SIGNAL_WEIGHT]` with `base + x·dir ⪰ margin`, by
/// bisection. `None` when even tiny weights break the margin.
fn largest_weight(base: &CMatrix, dir: &CMatrix, margin: f64) -> Option<f64> {
    let ok = |x: f64| min_eigenvalue(&(base + dir.scale(x))) >= margin;
    if ok(MAX_SIGNAL_WEIGHT) {
        return Some(MAX_SIGNAL_WEIGHT);
    }
    let (mut lo, mut hi) = (0.0, MAX_SIGNAL_WEIGHT);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then_some(lo)
}

/// Peripheral entries with a nonzero derivative, largest `|λ̇|` first.
fn moving_entries(spec: &PeripheralSpectrum, tol: &Tolerances) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..spec.entries.len())
        .filter(|&i| {
            spec.entries[i]
                .lambda_dot
                .is_some_and(|v| v.norm() > tol.nonzero_derivative)
        })
        .collect();
    idx.sort_by(|&a, &b| {
        let na = spec.entries[a].lambda_dot.unwrap_or_default().norm();
        let nb = spec.entries[b].lambda_dot.unwrap_or_default().norm();
        nb.total_cmp(&na).then(a.cmp(&b))
    });
    idx
}

fn unresolved_note(spec: &PeripheralSpectrum) -> Option<String> {
    let n = spec.entries.iter().filter(|e| e.lambda_dot.is_none()).count();
    (n > 0).then(|| {
        format!("{n} peripheral eigenvalue derivative(s) could not be resolved inside degenerate clusters")
    })
}

pub fn check_corollary1(pc: &ParamChannel, rho0_hint: Option<&DensityMatrix>) -> HlVerdict {
    check_corollary1_with(pc, rho0_hint, &Tolerances::default())
}

/// Orthogonal peripheral eigenvectors plus one moving peripheral eigenvalue.
///
/// The witness state is `(1−α)I/d + αρ_* + β(R_j + R_j†)` with `α = 1/2` and
/// the largest `β ≤ 1/4` that keeps it positive with the configured margin.
/// A supplied hint is only checked for overlap with the witness eigenvector.
pub fn check_corollary1_with(
    pc: &ParamChannel,
    rho0_hint: Option<&DensityMatrix>,
    tol: &Tolerances,
) -> HlVerdict {
    let spec = match peripheral_spectrum(pc, tol) {
        Ok(s) => s,
        Err(e) => return HlVerdict::inconclusive(format!("peripheral spectrum unavailable: {e}")),
    };
    let d = spec.dim;
    let mut diagnostics = spec.warnings.clone();
    let gram = spec.gram();
    let k = gram.nrows();
    let off = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| gram[(i, j)].norm())
        .fold(0.0, f64::max);
    if off > tol.gram_orthogonal {
        diagnostics.push(format!(
            "peripheral eigenvectors are not mutually orthogonal (largest overlap {off:.3e}); \
             use the asymptotic QFI of a concrete input state instead"
        ));
        return HlVerdict {
            status: HlStatus::NotDetected,
            witness: None,
            diagnostics,
        };
    }
    let moving = moving_entries(&spec, tol);
    let Some(&j) = moving.first() else {
        if let Some(note) = unresolved_note(&spec) {
            diagnostics.push(note);
            return HlVerdict {
                status: HlStatus::Inconclusive,
                witness: None,
                diagnostics,
            };
        }
        diagnostics.push("every peripheral eigenvalue is stationary at θ₀".into());
        return HlVerdict {
            status: HlStatus::NotDetected,
            witness: None,
            diagnostics,
        };
    };
    let Some(fp) = spec.entries.iter().find(|e| e.is_fixed_point) else {
        diagnostics.push("no fixed-point state found among the peripheral eigenvectors".into());
        return HlVerdict {
            status: HlStatus::Inconclusive,
            witness: None,
            diagnostics,
        };
    };
    let fixed = fp.eigenmatrix(d);
    let fixed = fixed.unscale(trace(&fixed).re);
    let entry = &spec.entries[j];
    let dir = signal_direction(&entry.eigenmatrix(d), 1e-8);
    let base = identity(d).scale((1.0 - FIXED_POINT_WEIGHT) / d as f64) + fixed.scale(FIXED_POINT_WEIGHT);
    let state = largest_weight(&base, &dir, tol.psd_margin)
        .and_then(|beta| DensityMatrix::with_tolerance(base + dir.scale(beta), 1e-9).ok());
    let Some(input_state) = state else {
        diagnostics.push("could not build a positive witness state".into());
        return HlVerdict {
            status: HlStatus::Inconclusive,
            witness: None,
            diagnostics,
        };
    };
    if let Some(hint) = rho0_hint {
        let a = entry.left.dotc(&hint.vectorize());
        if a.norm() <= 1e-12 {
            diagnostics.push(format!(
                "the supplied input state has no weight on eigenvalue {:.6}; use the witness state",
                entry.lambda
            ));
        }
    }
    HlVerdict {
        status: HlStatus::Achievable,
        witness: Some(HlWitness {
            index: j,
            lambda: entry.lambda,
            lambda_dot: entry.lambda_dot.expect("moving entry"),
            input_state,
        }),
        diagnostics,
    }
}

pub fn check_corollary2(pc: &ParamChannel) -> HlVerdict {
    check_corollary2_with(pc, &Tolerances::default())
}

/// For unital channels: a moving peripheral eigenvalue whose eigenmatrix is
/// Hermitian up to a phase or has `Tr R² = 0`. Witness `I/d + α(R + R†)`.
pub fn check_corollary2_with(pc: &ParamChannel, tol: &Tolerances) -> HlVerdict {
    let t = match pc.transition() {
        Ok(t) => t,
        Err(e) => return HlVerdict::inconclusive(format!("transition matrix unavailable: {e}")),
    };
    if !unitality_check(&t) {
        return HlVerdict::inconclusive("NotUnital: the channel does not preserve the identity");
    }
    let spec = match peripheral_spectrum(pc, tol) {
        Ok(s) => s,
        Err(e) => return HlVerdict::inconclusive(format!("peripheral spectrum unavailable: {e}")),
    };
    let d = spec.dim;
    let mut diagnostics = spec.warnings.clone();
    let base = identity(d).unscale(d as f64);
    for j in moving_entries(&spec, tol) {
        let entry = &spec.entries[j];
        let r = entry.eigenmatrix(d);
        let herm = hermitian_representative(&r, 1e-8).is_some();
        let nilpotent_trace = trace(&(&r * &r)).norm() <= 1e-8 * r.norm_squared();
        if !(herm || nilpotent_trace) {
            diagnostics.push(format!(
                "eigenmatrix of {:.6} is neither Hermitian up to a phase nor has Tr R² = 0",
                entry.lambda
            ));
            continue;
        }
        let dir = signal_direction(&r, 1e-8);
        let state = largest_weight(&base, &dir, tol.psd_margin)
            .and_then(|a| DensityMatrix::with_tolerance(&base + dir.scale(a), 1e-9).ok());
        if let Some(input_state) = state {
            return HlVerdict {
                status: HlStatus::Achievable,
                witness: Some(HlWitness {
                    index: j,
                    lambda: entry.lambda,
                    lambda_dot: entry.lambda_dot.expect("moving entry"),
                    input_state,
                }),
                diagnostics,
            };
        }
    }
    if let Some(note) = unresolved_note(&spec) {
        diagnostics.push(note);
        return HlVerdict {
            status: HlStatus::Inconclusive,
            witness: None,
            diagnostics,
        };
    }
    diagnostics.push("no moving peripheral eigenvalue with a usable eigenmatrix".into());
    HlVerdict {
        status: HlStatus::NotDetected,
        witness: None,
        diagnostics,
    }
}

// ---------------------------------------------------------------------------
// Signal operator

#[derive(Debug, Clone)]
pub struct SignalEigen {
    pub mu: C64,
    /// Unit-norm eigenmatrix.
    pub r0: CMatrix,
}

#[derive(Debug, Clone)]
pub struct SignalOperator {
    /// Projection onto the eigenvalue-1 eigenspace of `T†T`.
    pub p: CMatrix,
    /// `P·T†·Ṫ·P`.
    pub s: CMatrix,
    pub nonzero_eigs: Vec<SignalEigen>,
}

impl SignalOperator {
    pub fn rank(&self) -> usize {
        trace(&self.p).re.round() as usize
    }
}

pub fn signal_operator(pc: &ParamChannel) -> Result<SignalOperator> {
    signal_operator_with(pc, &Tolerances::default())
}

pub fn signal_operator_with(pc: &ParamChannel, tol: &Tolerances) -> Result<SignalOperator> {
    let d = pc.dim();
    let t = pc.transition()?.into_matrix();
    let t_dot = pc.derivative()?;
    let (w, v) = eig_hermitian(&(t.adjoint() * &t))?;
    let n = t.nrows();
    let mut p = CMatrix::zeros(n, n);
    for (i, &x) in w.iter().enumerate() {
        if (x - 1.0).abs() <= tol.fixed_point {
            let c = v.column(i);
            p += c * c.adjoint();
        }
    }
    let s = &p * t.adjoint() * t_dot * &p;
    let mut nonzero_eigs = Vec::new();
    let pairs = eig_general_with(&s, tol.eig_cluster)?;
    let mut seen = Vec::new();
    for pair in &pairs {
        if seen.contains(&pair.cluster) || pair.value.norm() <= tol.signal {
            continue;
        }
        seen.push(pair.cluster);
        let members: Vec<C64> = pairs
            .iter()
            .filter(|q| q.cluster == pair.cluster)
            .map(|q| q.value)
            .collect();
        let mu = members.iter().sum::<C64>() / members.len() as f64;
        let space = eigenspace(&s, mu, members.len())?;
        for c in space.right.column_iter() {
            let col: CVector = c.into_owned();
            let r0 = unvectorize(&col.unscale(col.norm()), d)?;
            nonzero_eigs.push(SignalEigen { mu, r0 });
        }
    }
    Ok(SignalOperator { p, s, nonzero_eigs })
}

#[derive(Debug, Clone)]
pub struct R0Candidate {
    pub mu: C64,
    pub r0: CMatrix,
    pub r0_adjoint: CMatrix,
}

#[derive(Debug, Clone)]
pub struct Theorem2Check {
    pub unital: bool,
    pub signal_nonvanishing: bool,
    pub signal_normal: bool,
    pub r0_candidates: Vec<R0Candidate>,
    /// `Inconclusive` when the channel is not unital or the signal is not
    /// normal; otherwise `Achievable` pending a control, `NotDetected` when
    /// the signal vanishes.
    pub status: HlStatus,
    pub diagnostics: Vec<String>,
}

pub fn check_theorem2_conditions(pc: &ParamChannel) -> Result<Theorem2Check> {
    check_theorem2_conditions_with(pc, &Tolerances::default())
}

pub fn check_theorem2_conditions_with(pc: &ParamChannel, tol: &Tolerances) -> Result<Theorem2Check> {
    let unital = unitality_check(&pc.transition()?);
    let mut out = Theorem2Check {
        unital,
        signal_nonvanishing: false,
        signal_normal: false,
        r0_candidates: Vec::new(),
        status: HlStatus::Inconclusive,
        diagnostics: Vec::new(),
    };
    if !unital {
        out.diagnostics.push("NotUnital: the channel does not preserve the identity".into());
        return Ok(out);
    }
    let sig = signal_operator_with(pc, tol)?;
    let norm = sig.s.norm();
    out.signal_nonvanishing = norm > tol.signal;
    let comm = (&sig.s * sig.s.adjoint() - sig.s.adjoint() * &sig.s).norm();
    out.signal_normal = comm <= tol.normality * norm * norm;
    out.r0_candidates = sig
        .nonzero_eigs
        .iter()
        .map(|e| R0Candidate {
            mu: e.mu,
            r0: e.r0.clone(),
            r0_adjoint: e.r0.adjoint(),
        })
        .collect();
    out.status = if !out.signal_nonvanishing {
        out.diagnostics.push("the signal operator vanishes".into());
        HlStatus::NotDetected
    } else if !out.signal_normal {
        out.diagnostics.push(format!(
            "the signal operator is not normal (commutator norm {comm:.3e}); no control is attempted"
        ));
        HlStatus::Inconclusive
    } else {
        out.diagnostics
            .push("conditions hold; a unitary control must still be found".into());
        HlStatus::Achievable
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Error-correction diagnostic

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HnksStatus {
    InSpan,
    NotInSpan,
    /// Some Kraus derivative is not finite.
    IllDefined,
}

#[derive(Debug, Clone)]
pub struct HnksResult {
    pub status: HnksStatus,
    /// `H = i Σ K†K̇`.
    pub h: Option<CMatrix>,
    /// Distance of `H` from the Hermitian span of `{K_i†K_j}`.
    pub residual: Option<f64>,
}

pub fn hnks_check(ch: &KrausChannel, kraus_dots: &[CMatrix]) -> Result<HnksResult> {
    hnks_check_with(ch, kraus_dots, &Tolerances::default())
}

/// Whether `H = iΣK†K̇` lies in the real span of the Hermitian parts of
/// `{K_i†K_j}`.
pub fn hnks_check_with(ch: &KrausChannel, kraus_dots: &[CMatrix], tol: &Tolerances) -> Result<HnksResult> {
    let ops = ch.ops();
    if kraus_dots.len() != ops.len() {
        return Err(Error::ShapeMismatch {
            expected: (ops.len(), 1),
            found: (kraus_dots.len(), 1),
        });
    }
    let d = ch.dim();
    for k in kraus_dots {
        if k.shape() != (d, d) {
            return Err(Error::ShapeMismatch {
                expected: (d, d),
                found: k.shape(),
            });
        }
    }
    if kraus_dots.iter().any(|k| !is_finite(k)) {
        return Ok(HnksResult {
            status: HnksStatus::IllDefined,
            h: None,
            residual: None,
        });
    }
    let h = ops
        .iter()
        .zip(kraus_dots)
        .fold(CMatrix::zeros(d, d), |acc, (k, kd)| acc + k.adjoint() * kd)
        * C64::i();

    let i = C64::i();
    let mut span = Vec::new();
    for a in 0..ops.len() {
        for b in a..ops.len() {
            let m = ops[a].adjoint() * &ops[b];
            span.push(&m + m.adjoint());
            span.push((&m - m.adjoint()) * i);
        }
    }
    // Real coordinates: real and imaginary parts of every entry.
    let realify = |m: &CMatrix| -> CVector {
        CVector::from_iterator(
            2 * d * d,
            m.iter().map(|z| C64::from(z.re)).chain(m.iter().map(|z| C64::from(z.im))),
        )
    };
    let cols: Vec<CVector> = span.iter().map(realify).collect();
    let a = CMatrix::from_columns(&cols);
    let target = realify(&h);
    let s = svd(&a)?;
    let top = s.singular_values.first().copied().unwrap_or(0.0);
    let mut projected = CVector::zeros(target.len());
    for (j, &sv) in s.singular_values.iter().enumerate() {
        if sv > 1e-10 * top.max(1e-300) {
            let u = s.u.column(j);
            projected += u * u.dotc(&target);
        }
    }
    let residual = (&target - projected).norm();
    let status = if residual > tol.span_residual * h.norm().max(1.0) {
        HnksStatus::NotInSpan
    } else {
        HnksStatus::InSpan
    };
    Ok(HnksResult {
        status,
        h: Some(h),
        residual: Some(residual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    #[test]
    fn hermitian_up_to_phase() {
        let h = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 1.), c64(0., -1.), c64(0., 0.)]);
        let r = &h * C64::from_polar(1.0, 0.7);
        let back = hermitian_representative(&r, 1e-10).unwrap();
        assert!((&back - back.adjoint()).norm() < 1e-12);
        let nil = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
        assert!(hermitian_representative(&nil, 1e-10).is_none());
    }

    #[test]
    fn weight_search_respects_margin() {
        let base = identity(2).scale(0.5);
        let dir = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)]);
        assert_eq!(largest_weight(&base, &dir, 1e-6), Some(MAX_SIGNAL_WEIGHT));
        let w = largest_weight(&base, &dir.scale(4.0), 1e-6).unwrap();
        assert!((w - (0.5 - 1e-6) / 4.0).abs() < 1e-9);
    }
}
