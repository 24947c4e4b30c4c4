//! Ready-made channel families: qubit dephasing with a rotation, a qutrit
//! decay channel with oscillating peripheral spectrum, and a two-qubit
//! Heisenberg evolution followed by correlated noise.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::channels::{
    kraus_to_transition, unitary_transition, DensityMatrix, DerivativeMode, KrausChannel,
    KrausDotFn, KrausFn, MatrixFn, ParamChannel, TransitionFn, TransitionMatrix,
};
use crate::error::{Error, Result};
use crate::numerics::{
    c64, conj, expm_hermitian, expm_hermitian_derivative, identity, kron, CMatrix, C64,
};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of θ with its derivative.
#[derive(Clone)]
pub struct ScalarFn {
    f: RealFn,
    df: RealFn,
}

impl ScalarFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    /// Derivative by central difference with step `1e-6`.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let f: RealFn = Arc::new(f);
        let g = f.clone();
        Self {
            f,
            df: Arc::new(move |x| (g(x + 1e-6) - g(x - 1e-6)) / 2e-6),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0)
    }

    /// `a + b·θ`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(move |x| a + b * x, move |_| b)
    }

    pub fn value(&self, theta: f64) -> f64 {
        (self.f)(theta)
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        (self.df)(theta)
    }
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value >= lo && value <= hi) {
        return Err(Error::DomainViolation {
            name: name.into(),
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c64(1., 0.);
    m
}

/// `d√x/dθ = ẋ/(2√x)`, exactly zero when `ẋ = 0` and infinite at `x = 0`.
fn sqrt_rate(x: f64, x_dot: f64) -> f64 {
    if x_dot == 0.0 {
        0.0
    } else {
        x_dot / (2.0 * x.max(0.0).sqrt())
    }
}

// ---------------------------------------------------------------------------
// Qubit dephasing

fn dephasing_kraus(p: f64, phi: f64) -> Vec<CMatrix> {
    let u = CMatrix::from_diagonal(&crate::numerics::CVector::from_vec(vec![
        C64::from_polar(1.0, -phi / 2.0),
        C64::from_polar(1.0, phi / 2.0),
    ]));
    vec![
        u.scale((1.0 - p).max(0.0).sqrt()),
        (pauli_z() * &u).scale(p.max(0.0).sqrt()),
    ]
}

/// Dephasing with strength `p(θ)` composed with a `σ_z` rotation by `φ(θ)`.
///
/// Kraus operators `√(1−p)·e^{−iφσ_z/2}` and `√p·σ_z·e^{−iφσ_z/2}`. `T` and
/// `Ṫ` are diagonal in the row-major basis.
pub fn dephasing(p_fn: ScalarFn, phi_fn: ScalarFn, theta0: f64) -> Result<ParamChannel> {
    check_range("p", p_fn.value(theta0), 0.0, 1.0)?;
    let (pf, phf) = (p_fn.clone(), phi_fn.clone());
    let at: TransitionFn = Arc::new(move |theta| {
        let p = pf.value(theta);
        check_range("p", p, 0.0, 1.0)?;
        let phi = phf.value(theta);
        let off = 1.0 - 2.0 * p;
        let diag = [
            c64(1., 0.),
            C64::from_polar(off, -phi),
            C64::from_polar(off, phi),
            c64(1., 0.),
        ];
        TransitionMatrix::new(CMatrix::from_diagonal(&crate::numerics::CVector::from_row_slice(&diag)))
    });
    let (pf, phf) = (p_fn.clone(), phi_fn.clone());
    let t_dot: MatrixFn = Arc::new(move |theta| {
        let (p, p_dot) = (pf.value(theta), pf.derivative(theta));
        let (phi, phi_dot) = (phf.value(theta), phf.derivative(theta));
        let off = 1.0 - 2.0 * p;
        let minus = c64(-2.0 * p_dot, -phi_dot * off) * C64::from_polar(1.0, -phi);
        let plus = c64(-2.0 * p_dot, phi_dot * off) * C64::from_polar(1.0, phi);
        Ok(CMatrix::from_diagonal(&crate::numerics::CVector::from_row_slice(&[
            c64(0., 0.),
            minus,
            plus,
            c64(0., 0.),
        ])))
    });
    let (pf, phf) = (p_fn.clone(), phi_fn.clone());
    let kraus: KrausFn = Arc::new(move |theta| {
        let p = pf.value(theta);
        check_range("p", p, 0.0, 1.0)?;
        KrausChannel::new(dephasing_kraus(p, phf.value(theta)))
    });
    let (pf, phf) = (p_fn, phi_fn);
    let kraus_dot: KrausDotFn = Arc::new(move |theta| {
        let (p, p_dot) = (pf.value(theta), pf.derivative(theta));
        let (phi, phi_dot) = (phf.value(theta), phf.derivative(theta));
        let k = dephasing_kraus(p, phi);
        // d/dθ e^{−iφσ_z/2} = −i(φ̇/2)σ_z·e^{−iφσ_z/2}
        let gen = pauli_z().map(|z| z * c64(0.0, -phi_dot / 2.0));
        let u = dephasing_kraus(0.0, phi).remove(0);
        let k1 = u.scale(-sqrt_rate(1.0 - p, p_dot)) + &gen * &k[0];
        let k2 = (pauli_z() * &u).scale(sqrt_rate(p, p_dot)) + &gen * &k[1];
        Ok(vec![k1, k2])
    });
    Ok(ParamChannel::new(2, theta0, at, DerivativeMode::Analytic(t_dot)).with_kraus(kraus, Some(kraus_dot)))
}

// ---------------------------------------------------------------------------
// Qutrit decay

fn qutrit_kraus(theta: f64) -> Vec<CMatrix> {
    let a = (2.0 * theta).max(0.0).sqrt();
    let b = (0.5 - theta).max(0.0).sqrt();
    vec![
        ket_bra(3, 2, 0),
        ket_bra(3, 2, 1),
        ket_bra(3, 2, 2).scale(a),
        ket_bra(3, 0, 2).scale(b),
        ket_bra(3, 1, 2).scale(b),
    ]
}

/// Qutrit channel with Kraus operators `|2⟩⟨0|`, `|2⟩⟨1|`, `√(2θ)|2⟩⟨2|`,
/// `√(1/2−θ)|0⟩⟨2|`, `√(1/2−θ)|1⟩⟨2|` for `θ ∈ [0, 1/2]`.
///
/// Its nonzero eigenvalues are `1` and `2θ − 1`. `T` is affine in θ.
pub fn qutrit_decay(theta0: f64) -> Result<ParamChannel> {
    check_range("theta", theta0, 0.0, 0.5)?;
    let kraus: KrausFn = Arc::new(|theta| KrausChannel::new(qutrit_kraus(theta)));
    let e = |i, j| ket_bra(3, i, j);
    let slope = kron(&e(2, 2), &e(2, 2)).scale(2.0) - kron(&e(0, 2), &e(0, 2)) - kron(&e(1, 2), &e(1, 2));
    let t_dot: MatrixFn = Arc::new(move |_| Ok(slope.clone()));
    let kraus_dot: KrausDotFn = Arc::new(|theta| {
        let z = CMatrix::zeros(3, 3);
        let b_dot = sqrt_rate(0.5 - theta, -1.0);
        Ok(vec![
            z.clone(),
            z,
            ket_bra(3, 2, 2).scale(sqrt_rate(2.0 * theta, 2.0)),
            ket_bra(3, 0, 2).scale(b_dot),
            ket_bra(3, 1, 2).scale(b_dot),
        ])
    });
    Ok(ParamChannel::from_kraus(3, theta0, kraus, DerivativeMode::Analytic(t_dot))
        .with_domain(0.0, 0.5)
        .with_kraus_dot(kraus_dot))
}

/// `diag(1/4, 1/4, 1/2) + α·diag(1/4, 1/4, −1/2)` for `−1 < α < 1`.
pub fn qutrit_input_state(alpha: f64) -> Result<DensityMatrix> {
    if !(alpha > -1.0 && alpha < 1.0) {
        return Err(Error::DomainViolation {
            name: "alpha".into(),
            value: alpha,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let d = [0.25 * (1.0 + alpha), 0.25 * (1.0 + alpha), 0.5 * (1.0 - alpha)];
    DensityMatrix::new(CMatrix::from_diagonal(&crate::numerics::CVector::from_iterator(
        3,
        d.iter().map(|&x| c64(x, 0.0)),
    )))
}

// ---------------------------------------------------------------------------
// Two-qubit Heisenberg model with correlated noise

/// Parameters of the two-qubit example. Defaults are generic values without
/// accidental degeneracies.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergParams {
    /// Evolution time.
    pub t: f64,
    /// Probabilities of the three error branches.
    pub p: [f64; 3],
    /// Phases of the four `W` unitaries.
    pub phi: [f64; 4],
    pub theta0: f64,
}

impl Default for HeisenbergParams {
    fn default() -> Self {
        Self {
            t: 1.0,
            p: [0.1, 0.2, 0.3],
            phi: [0.3, 0.7, 1.1, 1.9],
            theta0: 0.5,
        }
    }
}

impl HeisenbergParams {
    fn validate(&self) -> Result<()> {
        for (i, &p) in self.p.iter().enumerate() {
            check_range(&format!("p{}", i + 1), p, 0.0, 1.0)?;
        }
        check_range("p1 + p2 + p3", self.p.iter().sum(), 0.0, 1.0)?;
        for (name, v) in [("t", self.t), ("theta0", self.theta0)]
            .into_iter()
            .chain(self.phi.iter().map(|&v| ("phi", v)))
        {
            if !v.is_finite() {
                return Err(Error::DomainViolation {
                    name: name.into(),
                    value: v,
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(())
    }
}

/// `σ_x⊗σ_x + σ_y⊗σ_y + σ_z⊗σ_z`.
pub fn heisenberg_coupling() -> CMatrix {
    kron(&pauli_x(), &pauli_x()) + kron(&pauli_y(), &pauli_y()) + kron(&pauli_z(), &pauli_z())
}

/// `σ_z⊗I + I⊗σ_z + θ·H_J`.
pub fn heisenberg_hamiltonian(theta: f64) -> CMatrix {
    let i2 = identity(2);
    kron(&pauli_z(), &i2) + kron(&i2, &pauli_z()) + heisenberg_coupling().scale(theta)
}

/// `U_t(θ) = exp(−i t H₀(θ))`.
pub fn heisenberg_unitary(t: f64, theta: f64) -> Result<CMatrix> {
    expm_hermitian(&heisenberg_hamiltonian(theta), c64(0.0, -t))
}

fn heisenberg_unitary_dot(t: f64, theta: f64) -> Result<CMatrix> {
    expm_hermitian_derivative(&heisenberg_hamiltonian(theta), &heisenberg_coupling(), c64(0.0, -t))
}

/// `W(φ)`: swaps `|10⟩ ↔ |11⟩` and puts phase `e^{iφ}` on `|01⟩` and on the
/// image of `|11⟩`.
pub fn w_unitary(phi: f64) -> CMatrix {
    let e = C64::from_polar(1.0, phi);
    let (o, z) = (c64(1., 0.), c64(0., 0.));
    CMatrix::from_row_slice(
        4,
        4,
        &[o, z, z, z, z, e, z, z, z, z, z, e, z, z, o, z],
    )
}

/// CNOT with the first qubit as control.
pub fn cnot() -> CMatrix {
    let (o, z) = (c64(1., 0.), c64(0., 0.));
    CMatrix::from_row_slice(4, 4, &[o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z])
}

/// Kraus form of the two-qubit noise:
/// `√(1−p₁−p₂−p₃)W₁`, `√p₁W₂(σ_x⊗σ_x)`, `√p₂W₃(σ_x⊗σ_y)`, `√p₃W₄(I⊗σ_z)`.
pub fn heisenberg_noise_kraus(p: [f64; 3], phi: [f64; 4]) -> Result<KrausChannel> {
    let p0 = 1.0 - p[0] - p[1] - p[2];
    let flips = [
        identity(4),
        kron(&pauli_x(), &pauli_x()),
        kron(&pauli_x(), &pauli_y()),
        kron(&identity(2), &pauli_z()),
    ];
    let weights = [p0, p[0], p[1], p[2]];
    let ops = (0..4)
        .map(|i| (w_unitary(phi[i]) * &flips[i]).scale(weights[i].max(0.0).sqrt()))
        .collect();
    KrausChannel::new(ops)
}

/// The 16×16 noise transition matrix written out entry by entry.
///
/// In terms of `ω₁ = 1−p₁−p₂`, `ω₂ = 1−ω₁`,
/// `ω₃ = e^{−iφ₁}(1−p₁−p₂−p₃) − e^{−iφ₄}p₃` and `ω₄ = e^{−iφ₂}p₁ − e^{−iφ₃}p₂`.
pub fn heisenberg_noise_transition(p: [f64; 3], phi: [f64; 4]) -> CMatrix {
    let w1 = c64(1.0 - p[0] - p[1], 0.0);
    let w2 = c64(1.0, 0.0) - w1;
    let w3 = C64::from_polar(1.0, -phi[0]) * (1.0 - p[0] - p[1] - p[2]) - C64::from_polar(p[2], -phi[3]);
    let w4 = C64::from_polar(p[0], -phi[1]) - C64::from_polar(p[1], -phi[2]);
    let (w3c, w4c) = (w3.conj(), w4.conj());
    // (row, [(column, value); 2]) in 0-based indices.
    let rows: [[(usize, C64); 2]; 16] = [
        [(0, w1), (15, w2)],
        [(1, w3), (14, w4)],
        [(3, w3), (12, w4)],
        [(2, w1), (13, w2)],
        [(4, w3c), (11, w4c)],
        [(5, w1), (10, w2)],
        [(7, w1), (8, w2)],
        [(6, w3c), (9, w4c)],
        [(3, w4c), (12, w3c)],
        [(2, w2), (13, w1)],
        [(0, w2), (15, w1)],
        [(1, w4c), (14, w3c)],
        [(7, w2), (8, w1)],
        [(6, w4), (9, w3)],
        [(4, w4), (11, w3)],
        [(5, w2), (10, w1)],
    ];
    let mut t = CMatrix::zeros(16, 16);
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            t[(r, c)] = v;
        }
    }
    t
}

/// `T_θ = T_noise·(U_t(θ) ⊗ U_t(θ)*)` with analytic derivative.
///
/// The explicit noise matrix is cross-checked against its Kraus form on
/// construction.
pub fn heisenberg_noisy(params: &HeisenbergParams) -> Result<ParamChannel> {
    params.validate()?;
    let noise_kraus = heisenberg_noise_kraus(params.p, params.phi)?;
    let noise = heisenberg_noise_transition(params.p, params.phi);
    let mismatch = (kraus_to_transition(&noise_kraus).matrix() - &noise).norm();
    if mismatch > 1e-10 {
        return Err(Error::AlgorithmInvariantViolated(format!(
            "explicit noise matrix differs from its Kraus form by {mismatch:.3e}"
        )));
    }
    noisy_evolution(params.t, params.theta0, noise_kraus, Arc::new(noise))
}

/// Heisenberg evolution followed by an arbitrary fixed noise channel.
fn noisy_evolution(t: f64, theta0: f64, noise_kraus: KrausChannel, noise: Arc<CMatrix>) -> Result<ParamChannel> {
    let n1 = noise.clone();
    let at: TransitionFn = Arc::new(move |theta| {
        let u = heisenberg_unitary(t, theta)?;
        TransitionMatrix::new(&*n1 * unitary_transition(&u))
    });
    let n2 = noise;
    let t_dot: MatrixFn = Arc::new(move |theta| {
        let u = heisenberg_unitary(t, theta)?;
        let u_dot = heisenberg_unitary_dot(t, theta)?;
        let d = kron(&u_dot, &conj(&u)) + kron(&u, &conj(&u_dot));
        Ok(&*n2 * d)
    });
    let nk = Arc::new(noise_kraus);
    let nk1 = nk.clone();
    let kraus: KrausFn = Arc::new(move |theta| {
        let u = heisenberg_unitary(t, theta)?;
        KrausChannel::new(nk1.ops().iter().map(|k| k * &u).collect())
    });
    let kraus_dot: KrausDotFn = Arc::new(move |theta| {
        let u_dot = heisenberg_unitary_dot(t, theta)?;
        Ok(nk.ops().iter().map(|k| k * &u_dot).collect())
    });
    Ok(ParamChannel::new(4, theta0, at, DerivativeMode::Analytic(t_dot)).with_kraus(kraus, Some(kraus_dot)))
}

/// Variant with every `W_i` equal to `W(φ)`, which admits the control
/// `U_t(θ₀)†W†`.
pub fn heisenberg_common_w(t: f64, p: [f64; 3], phi: f64, theta0: f64) -> Result<ParamChannel> {
    heisenberg_noisy(&HeisenbergParams {
        t,
        p,
        phi: [phi; 4],
        theta0,
    })
}

/// `U_t(θ)†(|01⟩⟨11| + |10⟩⟨00|)U_t(θ)`, the signal eigenmatrix of the
/// two-qubit example.
pub fn heisenberg_signal_eigenmatrix(t: f64, theta: f64) -> Result<CMatrix> {
    let u = heisenberg_unitary(t, theta)?;
    let r = ket_bra(4, 1, 3) + ket_bra(4, 2, 0);
    Ok(u.adjoint() * r * u)
}

/// `I/4 + α·U_t(θ₀)†(σ_x⊗I)U_t(θ₀)` for `0 < α < 1/4`.
pub fn heisenberg_input_state(t: f64, theta0: f64, alpha: f64) -> Result<DensityMatrix> {
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(Error::DomainViolation {
            name: "alpha".into(),
            value: alpha,
            lo: 0.0,
            hi: 0.25,
        });
    }
    second_qubit_input(t, theta0, alpha, [0.0; 3])
}

/// `U_t(θ₀)†[(I/2 + 2α·σ_x) ⊗ σ]U_t(θ₀)` with `σ = (I + r·σ)/2`.
///
/// With `r = 0` this is [`heisenberg_input_state`].
pub fn second_qubit_input(t: f64, theta0: f64, alpha: f64, bloch: [f64; 3]) -> Result<DensityMatrix> {
    let r = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
    check_range("|r|", r, 0.0, 1.0 + 1e-12)?;
    check_range("alpha", alpha, 0.0, 0.25)?;
    let u = heisenberg_unitary(t, theta0)?;
    let first = identity(2).scale(0.5) + pauli_x().scale(2.0 * alpha);
    let sigma = (identity(2) + pauli_x().scale(bloch[0]) + pauli_y().scale(bloch[1]) + pauli_z().scale(bloch[2]))
        .scale(0.5);
    let rho = u.adjoint() * kron(&first, &sigma) * u;
    DensityMatrix::with_tolerance(crate::numerics::hermitian_part(&rho), 1e-10)
}

/// Setup of the state-preparation robustness experiment: every `W_i` equal
/// to `W(φ)`, controlled by `U_t(θ₀)†W(φ)†`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessSetup {
    pub t: f64,
    pub p: [f64; 3],
    pub phi: f64,
    pub theta0: f64,
    /// Weight of `σ_x` on the first qubit, `0 < α < 1/4`.
    pub alpha: f64,
    /// Apply the control; without it the output carries no asymptotic signal.
    pub controlled: bool,
}

impl Default for RobustnessSetup {
    fn default() -> Self {
        Self {
            t: 1.0,
            p: [0.1, 0.2, 0.3],
            phi: 0.4,
            theta0: 0.5,
            alpha: 0.1,
            controlled: true,
        }
    }
}

/// Control `U_t(θ₀)†W(φ)†` for the common-`W` channel.
pub fn common_w_control(t: f64, phi: f64, theta0: f64) -> Result<CMatrix> {
    Ok(heisenberg_unitary(t, theta0)?.adjoint() * w_unitary(phi).adjoint())
}

/// Asymptotic QFI report for each second-qubit Bloch vector.
pub fn robustness_sweep(setup: &RobustnessSetup, blochs: &[[f64; 3]]) -> Result<Vec<crate::qfi::AsymptoticQfiReport>> {
    let base = heisenberg_common_w(setup.t, setup.p, setup.phi, setup.theta0)?;
    let pc = if setup.controlled {
        base.controlled(&common_w_control(setup.t, setup.phi, setup.theta0)?)?
    } else {
        base
    };
    blochs
        .iter()
        .map(|&r| {
            let rho0 = second_qubit_input(setup.t, setup.theta0, setup.alpha, r)?;
            crate::qfi::asymptotic_qfi(&pc, &rho0)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Named scenarios

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    Dephasing,
    QutritDecay,
    HeisenbergNoisy,
}

impl ScenarioName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dephasing" => Some(Self::Dephasing),
            "qutrit-decay" => Some(Self::QutritDecay),
            "heisenberg" => Some(Self::HeisenbergNoisy),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dephasing => "dephasing",
            Self::QutritDecay => "qutrit-decay",
            Self::HeisenbergNoisy => "heisenberg",
        }
    }

    /// Parameter keys accepted by [`ScenarioSpec::build`], with defaults.
    pub fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            // p(θ) = p0 + p_rate·θ, φ(θ) = phi0 + phi_rate·θ
            Self::Dephasing => &[("p0", 0.0), ("p_rate", 1.0), ("phi0", PI / 4.0), ("phi_rate", 0.0)],
            Self::QutritDecay => &[],
            Self::HeisenbergNoisy => &[
                ("t", 1.0),
                ("p1", 0.1),
                ("p2", 0.2),
                ("p3", 0.3),
                ("phi1", 0.3),
                ("phi2", 0.7),
                ("phi3", 1.1),
                ("phi4", 1.9),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub params: BTreeMap<String, f64>,
    pub theta0: f64,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName, theta0: f64) -> Self {
        Self {
            name,
            params: name.defaults().iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            theta0,
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !self.params.contains_key(key) {
            return Err(Error::InvalidInput(format!(
                "scenario {} has no parameter {key:?}",
                self.name.as_str()
            )));
        }
        self.params.insert(key.to_string(), value);
        Ok(())
    }

    fn get(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn heisenberg_params(&self) -> Option<HeisenbergParams> {
        (self.name == ScenarioName::HeisenbergNoisy).then(|| HeisenbergParams {
            t: self.get("t"),
            p: [self.get("p1"), self.get("p2"), self.get("p3")],
            phi: [self.get("phi1"), self.get("phi2"), self.get("phi3"), self.get("phi4")],
            theta0: self.theta0,
        })
    }

    pub fn build(&self) -> Result<ParamChannel> {
        match self.name {
            ScenarioName::Dephasing => dephasing(
                ScalarFn::linear(self.get("p0"), self.get("p_rate")),
                ScalarFn::linear(self.get("phi0"), self.get("phi_rate")),
                self.theta0,
            ),
            ScenarioName::QutritDecay => qutrit_decay(self.theta0),
            ScenarioName::HeisenbergNoisy => heisenberg_noisy(&self.heisenberg_params().expect("heisenberg")),
        }
    }
}
