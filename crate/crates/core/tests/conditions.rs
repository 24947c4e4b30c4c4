mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use seqmetro::channels::*;
use seqmetro::conditions::*;
use seqmetro::numerics::{c64, kron, CMatrix, C64};
use seqmetro::qfi::asymptotic_qfi;
use seqmetro::scenarios::*;

fn transition_family(
    d: usize,
    at: impl Fn(f64) -> CMatrix + Send + Sync + 'static,
    dot: CMatrix,
    domain: (f64, f64),
) -> ParamChannel {
    let at: TransitionFn = Arc::new(move |th| TransitionMatrix::new(at(th)));
    let dot: MatrixFn = Arc::new(move |_| Ok(dot.clone()));
    ParamChannel::new(d, 0.0, at, DerivativeMode::Analytic(dot)).with_domain(domain.0, domain.1)
}

/// Qubit depolarizing with strength θ, `ρ ↦ (1−θ)ρ + θ Tr(ρ) I/2`.
fn depolarizing() -> ParamChannel {
    let vi = seqmetro::channels::vectorize(&CMatrix::identity(2, 2));
    let reset = &vi * vi.adjoint() * c64(0.5, 0.0);
    let id = CMatrix::identity(4, 4);
    let dot = &reset - &id;
    transition_family(2, move |th| id.scale(1.0 - th) + reset.scale(th), dot, (0.0, 1.0))
}

/// Amplitude damping with `γ = 1 − e^{−θ}`: the identity at θ = 0 with a
/// non-normal generator.
fn amplitude_damping_semigroup() -> (ParamChannel, CMatrix) {
    let j = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
    let jj = j.adjoint() * &j;
    let id = CMatrix::identity(2, 2);
    let gen = kron(&j, &j.conjugate()) - (kron(&jj, &id) + kron(&id, &jj.transpose())).scale(0.5);
    let at = move |th: f64| {
        let g = 1.0 - (-th).exp();
        let k0 = CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64((1.0 - g).sqrt(), 0.)]);
        let k1 = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(g.sqrt(), 0.), c64(0., 0.), c64(0., 0.)]);
        kron(&k0, &k0.conjugate()) + kron(&k1, &k1.conjugate())
    };
    (transition_family(2, at, gen.clone(), (0.0, 10.0)), gen)
}

fn static_channel() -> ParamChannel {
    let mut r = rng(31);
    ParamChannel::constant(KrausChannel::new(random_kraus(&mut r, 2, 2)).unwrap().transition(), 0.0)
}

#[test]
fn first_sufficient_condition() {
    let phi = PI / 3.0;
    let pc = dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(phi), 0.0).unwrap();
    let v = check_corollary1(&pc, None);
    assert_eq!(v.status, HlStatus::Achievable);
    let w = v.witness.unwrap();
    assert!((w.lambda_dot - w.lambda * -2.0).norm() < 1e-8);
    assert!((w.lambda_dot.norm() - 2.0).abs() < 1e-8);
    let rep = asymptotic_qfi(&pc, &w.input_state).unwrap();
    assert!(rep.n2_coefficient > 0.0);

    let v = check_corollary1(&static_channel(), None);
    assert_eq!(v.status, HlStatus::NotDetected);

    let v = check_corollary1(&qutrit_decay(0.0).unwrap(), None);
    assert_eq!(v.status, HlStatus::NotDetected);
    assert!(v.diagnostics.iter().any(|d| d.contains("asymptotic QFI")));
}

#[test]
fn unital_sufficient_condition() {
    let pc = dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(PI / 4.0), 0.0).unwrap();
    let v = check_corollary2(&pc);
    assert_eq!(v.status, HlStatus::Achievable);
    let rep = asymptotic_qfi(&pc, &v.witness.unwrap().input_state).unwrap();
    assert!(rep.n2_coefficient > 0.0);

    let pc = depolarizing();
    let v = check_corollary2(&pc);
    assert_eq!(v.status, HlStatus::Achievable, "{:?}", v.diagnostics);
    let w = v.witness.unwrap();
    assert!((w.lambda_dot + 1.0).norm() < 1e-8);
    assert!(asymptotic_qfi(&pc, &w.input_state).unwrap().n2_coefficient > 0.0);

    let v = check_corollary2(&qutrit_decay(0.0).unwrap());
    assert_eq!(v.status, HlStatus::Inconclusive);
    assert!(v.diagnostics[0].contains("NotUnital"));
}

#[test]
fn signal_operator_examples() {
    // unitary family: P = I and s = T†Ṫ
    let pc = dephasing(ScalarFn::constant(0.0), ScalarFn::linear(0.3, 1.0), 0.0).unwrap();
    let sig = signal_operator(&pc).unwrap();
    assert!(close(&sig.p, &CMatrix::identity(4, 4), 1e-10));
    let t = pc.transition().unwrap();
    let want = t.matrix().adjoint() * pc.derivative().unwrap();
    assert!(close(&sig.s, &want, 1e-10));

    assert!(signal_operator(&static_channel()).unwrap().s.norm() < 1e-12);

    let hp = HeisenbergParams::default();
    let pc = heisenberg_noisy(&hp).unwrap();
    let sig = signal_operator(&pc).unwrap();
    assert_eq!(sig.rank(), 4);
    assert_eq!(sig.nonzero_eigs.len(), 2);
    let r1 = heisenberg_signal_eigenmatrix(hp.t, hp.theta0).unwrap();
    let r2 = r1.adjoint();
    let matches = |m: &CMatrix| phase_overlap(m, &r1).max(phase_overlap(m, &r2));
    for e in &sig.nonzero_eigs {
        assert!((matches(&e.r0) - 1.0).abs() < 1e-8);
    }
    // conjugate pair for a normal signal
    let (a, b) = (sig.nonzero_eigs[0].mu, sig.nonzero_eigs[1].mu);
    assert!((a - b.conj()).norm() < 1e-8);
}

#[test]
fn signal_projector_is_basis_independent() {
    let mut r = rng(32);
    let v = random_unitary(&mut r, 4);
    let vv = unitary_transition(&v);
    let pc = heisenberg_noisy(&HeisenbergParams::default()).unwrap();
    let t0 = pc.transition().unwrap().into_matrix();
    let dot = pc.derivative().unwrap();
    let conj_t = &vv * &t0 * vv.adjoint();
    let conj_dot = &vv * &dot * vv.adjoint();
    let at: TransitionFn = Arc::new(move |_| TransitionMatrix::new(conj_t.clone()));
    let dot_fn: MatrixFn = Arc::new(move |_| Ok(conj_dot.clone()));
    let rotated = ParamChannel::new(4, pc.theta0(), at, DerivativeMode::Analytic(dot_fn));
    let p = signal_operator(&pc).unwrap().p;
    let p_rot = signal_operator(&rotated).unwrap().p;
    assert!(close(&p_rot, &(&vv * p * vv.adjoint()), 1e-9));
}

#[test]
fn unitary_signal_conditions() {
    let pc = heisenberg_noisy(&HeisenbergParams::default()).unwrap();
    let c = check_theorem2_conditions(&pc).unwrap();
    assert!(c.unital && c.signal_nonvanishing && c.signal_normal);
    assert_eq!(c.r0_candidates.len(), 2);
    assert_eq!(c.status, HlStatus::Achievable);

    let c = check_theorem2_conditions(&static_channel()).unwrap();
    assert!(!c.signal_nonvanishing || !c.unital);

    let c = check_theorem2_conditions(&dephasing(ScalarFn::constant(0.2), ScalarFn::constant(0.1), 0.0).unwrap()).unwrap();
    assert!(c.unital && !c.signal_nonvanishing);
    assert_eq!(c.status, HlStatus::NotDetected);

    let (pc, gen) = amplitude_damping_semigroup();
    assert!((&gen * gen.adjoint() - gen.adjoint() * &gen).norm() > 0.1);
    let c = check_theorem2_conditions(&pc).unwrap();
    assert!(c.unital && c.signal_nonvanishing && !c.signal_normal);
    assert_eq!(c.status, HlStatus::Inconclusive);
}

#[test]
fn kraus_span_check() {
    let d0 = dephasing(ScalarFn::constant(0.0), ScalarFn::linear(0.0, 1.0), 0.0).unwrap();
    let r = hnks_check(&d0.kraus().unwrap().unwrap(), &d0.kraus_dot().unwrap().unwrap()).unwrap();
    assert_eq!(r.status, HnksStatus::NotInSpan);
    assert!(close(&r.h.unwrap(), &pauli_z().scale(0.5), 1e-10));

    let d3 = dephasing(ScalarFn::constant(0.3), ScalarFn::linear(0.0, 1.0), 0.0).unwrap();
    let r = hnks_check(&d3.kraus().unwrap().unwrap(), &d3.kraus_dot().unwrap().unwrap()).unwrap();
    assert_eq!(r.status, HnksStatus::InSpan);
    assert!(close(r.h.as_ref().unwrap(), &pauli_z().scale(0.5), 1e-10));

    let dp = dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(0.4), 0.0).unwrap();
    let r = hnks_check(&dp.kraus().unwrap().unwrap(), &dp.kraus_dot().unwrap().unwrap()).unwrap();
    assert_eq!(r.status, HnksStatus::IllDefined);
    assert!(r.h.is_none());

    // unitary channel e^{−iθH₀}: span is {I}
    let mut g = rng(33);
    let h0 = random_hermitian(&mut g, 3);
    let h0 = &h0 - CMatrix::identity(3, 3) * (h0.trace() / C64::from(3.0));
    let k = KrausChannel::identity(3);
    let r = hnks_check(&k, &[h0.map(|z| z * c64(0.0, -1.0))]).unwrap();
    assert_eq!(r.status, HnksStatus::NotInSpan);
    assert!(close(r.h.as_ref().unwrap(), &h0, 1e-10));
}

#[test]
fn hermitian_representatives() {
    assert!(hermitian_representative(&pauli_x(), 1e-9).is_some());
    let phased = pauli_x().map(|z| z * c64(0.0, 1.0));
    let h = hermitian_representative(&phased, 1e-9).unwrap();
    assert!((&h - h.adjoint()).norm() < 1e-12);
    let coherence = CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)]);
    assert!(hermitian_representative(&coherence, 1e-9).is_none());
}
