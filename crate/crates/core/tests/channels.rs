mod common;

use std::f64::consts::PI;

use common::*;
use seqmetro::channels::*;
use seqmetro::numerics::{c64, hs_inner, CMatrix, CVector};
use seqmetro::scenarios::*;

fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

#[test]
fn vectorization_examples() {
    let half = CMatrix::identity(2, 2).scale(0.5);
    let v = vectorize(&half);
    let want = CVector::from_vec(vec![c64(0.5, 0.), c64(0., 0.), c64(0., 0.), c64(0.5, 0.)]);
    assert_eq!(v, want);
    let v = vectorize(&ket_bra(2, 0, 1));
    assert_eq!(v[1], c64(1.0, 0.0));
    assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 1);

    let mut r = rng(1);
    for _ in 0..10 {
        let a = ginibre(&mut r, 3, 3);
        let b = ginibre(&mut r, 3, 3);
        let lhs = vectorize(&a).dotc(&vectorize(&b));
        let rhs = (a.adjoint() * &b).trace();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((hs_inner(&a, &b) - rhs).norm() < 1e-12);
    }
}

#[test]
fn kraus_to_transition_examples() {
    let id = KrausChannel::identity(3);
    assert_eq!(*kraus_to_transition(&id).matrix(), CMatrix::identity(9, 9));

    let mut r = rng(2);
    let u = random_unitary(&mut r, 2);
    let t = kraus_to_transition(&KrausChannel::unitary(&u).unwrap());
    assert!(close(t.matrix(), &unitary_transition(&u), 1e-14));

    let (p, phi) = (0.1, PI / 4.0);
    let pc = dephasing(ScalarFn::constant(p), ScalarFn::constant(phi), 0.0).unwrap();
    let t = kraus_to_transition(&pc.kraus().unwrap().unwrap());
    let s = 1.0 - 2.0 * p;
    let want = CMatrix::from_diagonal(&CVector::from_vec(vec![
        c64(1.0, 0.0),
        c64(s * phi.cos(), -s * phi.sin()),
        c64(s * phi.cos(), s * phi.sin()),
        c64(1.0, 0.0),
    ]));
    assert!(close(t.matrix(), &want, 1e-14));
}

#[test]
fn apply_examples() {
    let mut r = rng(3);
    let rho = random_state(&mut r, 2);
    let out = apply_channel(&TransitionMatrix::identity(2), &rho).unwrap();
    assert!(close(out.matrix(), rho.matrix(), 1e-15));

    let pc = dephasing(ScalarFn::constant(0.5), ScalarFn::constant(1.3), 0.0).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&CVector::from_vec(vec![c64(h, 0.), c64(h, 0.)])).unwrap();
    let out = apply_channel(&pc.transition().unwrap(), &plus).unwrap();
    assert!(close(out.matrix(), &CMatrix::identity(2, 2).scale(0.5), 1e-15));

    let q = qutrit_decay(0.1).unwrap().transition().unwrap();
    let fixed = seqmetro::spectral::fixed_point(&q).unwrap();
    let again = apply_channel(&q, &fixed).unwrap();
    assert!(close(again.matrix(), fixed.matrix(), 1e-10));
}

#[test]
fn compose_control_examples() {
    let mut r = rng(4);
    let t = TransitionMatrix::new(unitary_transition(&random_unitary(&mut r, 2))).unwrap();
    let same = compose_control(&t, &CMatrix::identity(2, 2)).unwrap();
    assert!(close(same.matrix(), t.matrix(), 1e-15));

    let x = pauli_x();
    let xc = compose_control(&TransitionMatrix::identity(2), &x).unwrap();
    assert!(close(xc.matrix(), &unitary_transition(&x), 1e-15));

    let ch = KrausChannel::new(random_kraus(&mut r, 3, 2)).unwrap();
    let t = ch.transition();
    let u = random_unitary(&mut r, 3);
    let tc = compose_control(&t, &u).unwrap();
    for _ in 0..10 {
        let rho = random_state(&mut r, 3);
        let out = tc.apply(rho.matrix()).unwrap();
        let undone = u.adjoint() * out * &u;
        assert!(close(&undone, &ch.apply(rho.matrix()), 1e-12));
    }
}

#[test]
fn unitality_examples() {
    let pc = dephasing(ScalarFn::constant(0.2), ScalarFn::constant(0.4), 0.0).unwrap();
    assert!(unitality_check(&pc.transition().unwrap()));
    assert!(!unitality_check(&qutrit_decay(0.1).unwrap().transition().unwrap()));
    let mut r = rng(5);
    let u = random_unitary(&mut r, 3);
    assert!(unitality_check(&TransitionMatrix::new(unitary_transition(&u)).unwrap()));
}

#[test]
fn derivative_examples() {
    let mut r = rng(6);
    let ch = KrausChannel::new(random_kraus(&mut r, 2, 3)).unwrap();
    let pc = ParamChannel::constant(ch.transition(), 0.3);
    assert!(derivative(&pc).unwrap().norm() < 1e-14);

    let phi = 0.6;
    let pc = dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(phi), 0.0)
        .unwrap()
        .with_mode(DerivativeMode::OneSidedDifference(1e-6));
    let d = derivative(&pc).unwrap();
    let want = c64(-2.0 * phi.cos(), 2.0 * phi.sin());
    assert!((d[(1, 1)] - want).norm() < 1e-5);

    let hp = HeisenbergParams::default();
    let pc = heisenberg_noisy(&hp).unwrap();
    let analytic = derivative(&pc).unwrap();
    let numeric = derivative(&pc.clone().with_mode(DerivativeMode::CentralDifference(1e-5))).unwrap();
    assert!((&analytic - &numeric).norm() <= 1e-6 * analytic.norm());
}

#[test]
fn random_kraus_sets_are_cptp() {
    let mut r = rng(7);
    for d in 2..=4 {
        let ch = KrausChannel::new(random_kraus(&mut r, d, 3)).unwrap();
        let t = TransitionMatrix::from_untrusted(ch.transition().into_matrix()).unwrap();
        assert!(t.trace_preservation_residual() < 1e-12);
    }
}
