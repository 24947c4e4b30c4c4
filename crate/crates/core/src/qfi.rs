//! Fisher information of parametrized states and of the output of repeated
//! channel applications.

use crate::channels::{compose_control, unitary_transition, unvectorize, DensityMatrix, ParamChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    eig_hermitian, hermitian_part, hermitian_residual, hs_inner, trace,
    CMatrix, CVector, C64,
};
use crate::spectral::{expand_state, peripheral_spectrum, PeripheralSpectrum, StateExpansion};
use crate::tolerances::Tolerances;

/// Symmetric logarithmic derivative.
#[derive(Debug, Clone)]
pub struct SldResult {
    pub l: CMatrix,
    /// Number of eigenvalues of `ρ` above the support threshold.
    pub support_dim: usize,
}

/// `4(⟨ψ̇|ψ̇⟩ − |⟨ψ|ψ̇⟩|²)`.
pub fn qfi_pure(psi: &CVector, psi_dot: &CVector) -> Result<f64> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    if psi.len() != psi_dot.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: psi_dot.len(),
        });
    }
    let f = 4.0 * (psi_dot.norm_squared() - psi.dotc(psi_dot).norm_sqr());
    Ok(f.max(0.0))
}

fn check_derivative(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<()> {
    let d = rho.dim();
    if rho_dot.shape() != (d, d) {
        return Err(Error::ShapeMismatch {
            expected: (d, d),
            found: rho_dot.shape(),
        });
    }
    if !crate::numerics::is_finite(rho_dot) {
        return Err(Error::NonFinite);
    }
    let scale = rho_dot.norm().max(1.0);
    let residual = hermitian_residual(rho_dot);
    if residual > 1e-9 * scale {
        return Err(Error::NotHermitian { residual });
    }
    let tr = trace(rho_dot).norm();
    if tr > 1e-9 * scale {
        return Err(Error::InvalidInput(format!(
            "state derivative must be traceless (trace {tr:.3e})"
        )));
    }
    Ok(())
}

pub fn sld(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<SldResult> {
    sld_with(rho, rho_dot, &Tolerances::default())
}

/// Solves `2ρ̇ = ρL + Lρ` in the eigenbasis of `ρ`, leaving `L` zero on pairs
/// with `p_i + p_j` at or below the support threshold.
pub fn sld_with(rho: &DensityMatrix, rho_dot: &CMatrix, tol: &Tolerances) -> Result<SldResult> {
    check_derivative(rho, rho_dot)?;
    let (p, v) = eig_hermitian(rho.matrix())?;
    let n = p.len();
    let dot = v.adjoint() * hermitian_part(rho_dot) * &v;
    let kernel: Vec<usize> = (0..n).filter(|&i| p[i] <= tol.sld_support).collect();
    let leak = kernel
        .iter()
        .flat_map(|&i| kernel.iter().map(move |&j| (i, j)))
        .map(|(i, j)| dot[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    if leak >= tol.rank_leak {
        return Err(Error::RankDeficientSignal { weight: leak });
    }
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s = p[i] + p[j];
            if s > tol.sld_support {
                l[(i, j)] = dot[(i, j)] * (2.0 / s);
            }
        }
    }
    Ok(SldResult {
        l: hermitian_part(&(&v * l * v.adjoint())),
        support_dim: n - kernel.len(),
    })
}

pub fn qfi_mixed(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<f64> {
    qfi_mixed_with(rho, rho_dot, &Tolerances::default())
}

/// `Tr(ρL²)`, evaluated as `Σ 2|ρ̇_ij|²/(p_i + p_j)` over the support.
pub fn qfi_mixed_with(rho: &DensityMatrix, rho_dot: &CMatrix, tol: &Tolerances) -> Result<f64> {
    // validates and detects rank leaks
    sld_with(rho, rho_dot, tol)?;
    let (p, v) = eig_hermitian(rho.matrix())?;
    let dot = v.adjoint() * hermitian_part(rho_dot) * &v;
    let mut f = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let s = p[i] + p[j];
            if s > tol.sld_support {
                f += 2.0 * dot[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(f.max(0.0))
}

const PURITY_FLOOR: f64 = 1e-12;

/// QFI of the normalized vectorization `|ρ⟩⟩/√Tr(ρ²)`:
/// `4{⟨⟨ρ̇|ρ̇⟩⟩/Tr(ρ²) − [⟨⟨ρ|ρ̇⟩⟩/Tr(ρ²)]²}`.
pub fn associated_qfi(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<f64> {
    check_derivative(rho, rho_dot)?;
    let purity = rho.purity();
    if purity <= PURITY_FLOOR {
        return Err(Error::DegeneratePurity { purity });
    }
    let dd = hs_inner(rho_dot, rho_dot).re;
    let rd = hs_inner(rho.matrix(), rho_dot).re;
    Ok((4.0 * (dd / purity - (rd / purity).powi(2))).max(0.0))
}

/// `Tr(ρ²)/(4λ_max(ρ)) · F̃`, a lower bound on the QFI.
pub fn qfi_lower_bound(rho: &DensityMatrix, rho_dot: &CMatrix) -> Result<f64> {
    let f = associated_qfi(rho, rho_dot)?;
    let (w, _) = eig_hermitian(rho.matrix())?;
    let top = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(rho.purity() / (4.0 * top) * f)
}

// ---------------------------------------------------------------------------
// Asymptotic coefficients

/// Leading behaviour `F̃ ≈ n2·N² + n1·N` of the associated QFI after `N`
/// applications.
///
/// When the peripheral phases make the coefficients depend on `N`, they are
/// reported per residue class of `N` modulo `oscillation_period`. The scalar
/// fields hold the class `N ≡ 0`.
#[derive(Debug, Clone)]
pub struct AsymptoticQfiReport {
    pub n2_coefficient: f64,
    /// `None` when a weighted peripheral eigenvalue is degenerate and the
    /// derivative of its eigenvectors is not defined.
    pub n1_coefficient: Option<f64>,
    /// `β_ij` for `N ≡ 0`.
    pub beta: CMatrix,
    pub lambda_dots: Vec<Option<C64>>,
    /// `None` when every class gives the same coefficients or the phases are
    /// incommensurate (see `quasi_periodic`).
    pub oscillation_period: Option<usize>,
    /// The phases have no common period up to [`MAX_PERIOD`]. The per-class
    /// vectors then hold samples at `N = 0, 1, …, QUASI_PERIODIC_SAMPLES − 1`.
    pub quasi_periodic: bool,
    pub n2_by_residue: Vec<f64>,
    pub n1_by_residue: Option<Vec<f64>>,
    /// Largest N² coefficient over residue classes exceeds the threshold.
    pub achieves_hl: bool,
    pub coefficients: Vec<C64>,
    pub lambdas: Vec<C64>,
    gram: CMatrix,
}

pub const MAX_PERIOD: usize = 1024;
pub const QUASI_PERIODIC_SAMPLES: usize = 64;
const COEFFICIENT_FLOOR: f64 = 1e-12;

impl AsymptoticQfiReport {
    /// `β_ij(N) = conj(a_i λ_i^N)·a_j λ_j^N·⟨⟨R_i|R_j⟩⟩ / P_N`, with `P_N` the
    /// asymptotic purity for that `N`.
    pub fn beta_at(&self, n: u64) -> CMatrix {
        let c = self.weights(n);
        let k = c.len();
        let raw = CMatrix::from_fn(k, k, |i, j| c[i].conj() * c[j] * self.gram[(i, j)]);
        let p = raw.sum().re;
        raw.unscale(p)
    }

    /// N² coefficient for output length `n`.
    pub fn n2_at(&self, n: u64) -> f64 {
        let beta = self.beta_at(n);
        let x: Vec<C64> = self
            .lambda_dots
            .iter()
            .zip(&self.lambdas)
            .zip(&self.coefficients)
            .map(|((dot, &l), a)| {
                if a.norm() <= COEFFICIENT_FLOOR {
                    C64::new(0.0, 0.0)
                } else {
                    dot.unwrap_or_default() / l
                }
            })
            .collect();
        let k = x.len();
        let mut quad = C64::new(0.0, 0.0);
        let mut lin = C64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                quad += beta[(i, j)] * x[i].conj() * x[j];
                lin += beta[(i, j)] * x[j];
            }
        }
        (4.0 * (quad.re - lin.re * lin.re)).max(0.0)
    }

    /// Asymptotic purity `Tr ρ_N²` of the output.
    pub fn purity_at(&self, n: u64) -> f64 {
        let c = self.weights(n);
        let k = c.len();
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| (c[i].conj() * c[j] * self.gram[(i, j)]).re)
            .sum()
    }

    fn weights(&self, n: u64) -> Vec<C64> {
        self.coefficients
            .iter()
            .zip(&self.lambdas)
            .map(|(&a, &l)| a * pow(l, n))
            .collect()
    }
}

fn pow(z: C64, n: u64) -> C64 {
    if n <= u32::MAX as u64 {
        z.powu(n as u32)
    } else {
        z.powf(n as f64)
    }
}

pub fn asymptotic_qfi(pc: &ParamChannel, rho0: &DensityMatrix) -> Result<AsymptoticQfiReport> {
    asymptotic_qfi_with(pc, rho0, &Tolerances::default())
}

pub fn asymptotic_qfi_with(
    pc: &ParamChannel,
    rho0: &DensityMatrix,
    tol: &Tolerances,
) -> Result<AsymptoticQfiReport> {
    let spec = peripheral_spectrum(pc, tol)?;
    let exp = expand_state(&spec, rho0)?;
    asymptotic_from_spectrum(&spec, &exp, tol)
}

pub fn asymptotic_from_spectrum(
    spec: &PeripheralSpectrum,
    exp: &StateExpansion,
    tol: &Tolerances,
) -> Result<AsymptoticQfiReport> {
    let k = spec.entries.len();
    for (e, a) in spec.entries.iter().zip(&exp.coefficients) {
        if a.norm() > COEFFICIENT_FLOOR && e.lambda_dot.is_none() {
            return Err(Error::DegenerateUnresolved {
                value: format!("{:.6}", e.lambda),
                reason: "the input state has weight on a cluster whose eigenvalue derivatives \
                         are not defined at first order"
                    .into(),
            });
        }
    }
    let gram = spec.gram();
    let lambdas: Vec<C64> = spec.entries.iter().map(|e| e.lambda).collect();
    let weighted: Vec<usize> = (0..k)
        .filter(|&i| exp.coefficients[i].norm() > COEFFICIENT_FLOOR)
        .collect();

    let mut report = AsymptoticQfiReport {
        n2_coefficient: 0.0,
        n1_coefficient: None,
        beta: CMatrix::zeros(k, k),
        lambda_dots: spec.entries.iter().map(|e| e.lambda_dot).collect(),
        oscillation_period: None,
        quasi_periodic: false,
        n2_by_residue: Vec::new(),
        n1_by_residue: None,
        achieves_hl: false,
        coefficients: exp.coefficients.clone(),
        lambdas: lambdas.clone(),
        gram: gram.clone(),
    };
    let purity = report.purity_at(0);
    if purity <= PURITY_FLOOR {
        return Err(Error::DegeneratePurity { purity });
    }

    // Phases conj(λ_i)λ_j over pairs that actually contribute.
    let mut phases = Vec::new();
    for &i in &weighted {
        for &j in &weighted {
            let w = exp.coefficients[i] * exp.coefficients[j] * gram[(i, j)];
            if w.norm() > COEFFICIENT_FLOOR {
                phases.push(lambdas[i].conj() * lambdas[j]);
            }
        }
    }
    let period = common_period(&phases);
    let classes = match period {
        Some(p) => p,
        None => {
            report.quasi_periodic = true;
            QUASI_PERIODIC_SAMPLES
        }
    };
    report.oscillation_period = period.filter(|&p| p > 1);
    report.n2_by_residue = (0..classes as u64).map(|n| report.n2_at(n)).collect();
    report.n2_coefficient = report.n2_by_residue[0];
    report.beta = report.beta_at(0);
    report.achieves_hl = report
        .n2_by_residue
        .iter()
        .any(|&v| v > tol.hl_threshold);

    let all_whole = weighted
        .iter()
        .all(|&i| spec.groups[spec.entries[i].group].whole_cluster);
    if all_whole {
        let n1: Result<Vec<f64>> = (0..classes as u64)
            .map(|n| linear_coefficient(spec, exp, &weighted, n))
            .collect();
        let n1 = n1?;
        report.n1_coefficient = Some(n1[0]);
        report.n1_by_residue = Some(n1);
    }
    Ok(report)
}

/// Smallest `k ≤ MAX_PERIOD` with every `z^k ≈ 1`.
fn common_period(phases: &[C64]) -> Option<usize> {
    let one = C64::new(1.0, 0.0);
    (1..=MAX_PERIOD).find(|&k| phases.iter().all(|z| (z.powu(k as u32) - one).norm() <= 1e-8))
}

/// N¹ coefficient of `F̃` from `ρ̇_N ≈ N·A + B`, where `A` carries the
/// eigenvalue derivatives and `B` the derivative of the spectral projectors.
fn linear_coefficient(
    spec: &PeripheralSpectrum,
    exp: &StateExpansion,
    weighted: &[usize],
    n: u64,
) -> Result<f64> {
    let len = spec.t.nrows();
    let rho0 = {
        // |ρ₀⟩⟩ recovered from the expansion
        let peripheral = spec
            .entries
            .iter()
            .zip(&exp.coefficients)
            .fold(CVector::zeros(len), |acc, (e, &a)| acc + &e.right * a);
        peripheral + &exp.remainder
    };
    let mut groups: Vec<usize> = weighted.iter().map(|&i| spec.entries[i].group).collect();
    groups.sort_unstable();
    groups.dedup();

    let mut v = CVector::zeros(len);
    let mut a = CVector::zeros(len);
    let mut b = CVector::zeros(len);
    for g in groups {
        let grp = &spec.groups[g];
        let lambda = grp.value;
        let nu = grp.rate.unwrap_or_default();
        let proj = spec.group_projector(g);
        let phase = pow(lambda, n);
        let pr = &proj * &rho0;
        v += &pr * phase;
        a += &pr * (phase * nu / lambda);
        b += projector_derivative(spec, &proj, lambda)? * &rho0 * phase;
    }
    let p = v.norm_squared();
    let va = v.dotc(&a).re;
    let vb = v.dotc(&b).re;
    let ab = a.dotc(&b).re;
    Ok(8.0 * (ab / p - va * vb / (p * p)))
}

/// `Π̇ = −(Π·Ṫ·S + S·Ṫ·Π)` with `S` the reduced resolvent at `λ`.
fn projector_derivative(spec: &PeripheralSpectrum, proj: &CMatrix, lambda: C64) -> Result<CMatrix> {
    let len = spec.t.nrows();
    let shifted = &spec.t - CMatrix::identity(len, len) * lambda + proj;
    let inv = shifted.try_inverse().ok_or_else(|| {
        Error::AlgorithmInvariantViolated("reduced resolvent is singular".into())
    })?;
    let s = inv - proj;
    Ok(-(proj * &spec.t_dot * &s + &s * &spec.t_dot * proj))
}

// ---------------------------------------------------------------------------
// Exact finite-N propagation

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceQfi {
    pub qfi: f64,
    pub associated: f64,
    pub bound: f64,
}

/// Output state and its derivative after `n` channel uses.
#[derive(Debug, Clone)]
pub struct PropagatedState {
    pub n: u64,
    pub rho: DensityMatrix,
    pub rho_dot: CMatrix,
}

/// `(T, Ṫ)` at θ₀, with the control applied after each use.
fn controlled_pair(pc: &ParamChannel, control: Option<&CMatrix>) -> Result<(CMatrix, CMatrix)> {
    let t = pc.transition()?;
    let t_dot = pc.derivative()?;
    match control {
        None => Ok((t.into_matrix(), t_dot)),
        Some(u) => {
            let tc = compose_control(&t, u)?;
            Ok((tc.into_matrix(), unitary_transition(u) * t_dot))
        }
    }
}

/// Propagates `(|ρ⟩⟩, |ρ̇⟩⟩)` by `v ← Tv`, `w ← Ṫv + Tw` and returns the
/// pairs after each of `1..=n_max` uses.
pub fn propagate(
    pc: &ParamChannel,
    rho0: &DensityMatrix,
    control: Option<&CMatrix>,
    n_max: u64,
) -> Result<Vec<PropagatedState>> {
    if rho0.dim() != pc.dim() {
        return Err(Error::DimensionMismatch {
            expected: pc.dim(),
            found: rho0.dim(),
        });
    }
    let d = pc.dim();
    let (t, t_dot) = controlled_pair(pc, control)?;
    let mut v = rho0.vectorize();
    let mut w = CVector::zeros(v.len());
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let next_w = &t_dot * &v + &t * &w;
        v = &t * &v;
        w = next_w;
        let rho = DensityMatrix::with_tolerance(hermitian_part(&unvectorize(&v, d)?), 1e-8)?;
        out.push(PropagatedState {
            n,
            rho,
            rho_dot: hermitian_part(&unvectorize(&w, d)?),
        });
    }
    Ok(out)
}

/// QFI, associated QFI and lower bound of one propagated output.
pub fn evaluate(state: &PropagatedState, tol: &Tolerances) -> Result<SequenceQfi> {
    let (rho, dot) = (&state.rho, &state.rho_dot);
    Ok(SequenceQfi {
        qfi: qfi_mixed_with(rho, dot, tol)?,
        associated: associated_qfi(rho, dot)?,
        bound: qfi_lower_bound(rho, dot)?,
    })
}

/// Exact QFI quantities of the output after `n ≥ 1` uses of the channel.
pub fn exact_sequence_qfi(
    pc: &ParamChannel,
    rho0: &DensityMatrix,
    control: Option<&CMatrix>,
    n: u64,
) -> Result<SequenceQfi> {
    if n == 0 {
        return Err(Error::InvalidInput("sequence length must be at least 1".into()));
    }
    let states = propagate(pc, rho0, control, n)?;
    evaluate(states.last().expect("n ≥ 1"), &Tolerances::default())
}

/// [`exact_sequence_qfi`] for every `n` in `1..=n_max`.
pub fn exact_sequence_qfi_range(
    pc: &ParamChannel,
    rho0: &DensityMatrix,
    control: Option<&CMatrix>,
    n_max: u64,
    tol: &Tolerances,
) -> Result<Vec<SequenceQfi>> {
    propagate(pc, rho0, control, n_max)?
        .iter()
        .map(|s| evaluate(s, tol))
        .collect()
}
