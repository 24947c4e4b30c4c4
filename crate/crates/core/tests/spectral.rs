mod common;

use std::f64::consts::PI;

use common::*;
use seqmetro::channels::*;
use seqmetro::numerics::{c64, trace, CMatrix, CVector, C64};
use seqmetro::scenarios::*;
use seqmetro::spectral::*;
use seqmetro::tolerances::Tolerances;

fn spectrum(pc: &ParamChannel) -> PeripheralSpectrum {
    peripheral_spectrum(pc, &Tolerances::default()).unwrap()
}

fn sorted_values(spec: &PeripheralSpectrum) -> Vec<C64> {
    let mut v: Vec<C64> = spec.entries.iter().map(|e| e.lambda).collect();
    v.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    v
}

fn check_invariants(spec: &PeripheralSpectrum) {
    let d = spec.dim;
    let one = c64(1.0, 0.0);
    for e in &spec.entries {
        assert!(e.lambda.norm() >= 1.0 - spec.tolerance_used);
        assert!((e.left.dotc(&e.right) - one).norm() < 1e-9);
        assert!((e.right.norm() - 1.0).abs() < 1e-12);
        if e.lambda.im.abs() > 1e-9 {
            assert!(
                spec.entries.iter().any(|f| (f.lambda - e.lambda.conj()).norm() < 1e-9),
                "missing conjugate of {}",
                e.lambda
            );
        }
        if (e.lambda - one).norm() > 1e-9 {
            assert!(trace(&e.eigenmatrix(d)).norm() <= 1e-8);
        }
    }
    // the canonical fixed point is the projection of I/d, so it is flagged once
    assert_eq!(spec.entries.iter().filter(|e| e.is_fixed_point).count(), 1);
    let fp = spec.entries.iter().find(|e| e.is_fixed_point).unwrap();
    assert!((fp.lambda - one).norm() <= 1e-9);
}

#[test]
fn dephasing_peripheral_sets() {
    let pc = dephasing(ScalarFn::constant(0.1), ScalarFn::constant(PI / 4.0), 0.0).unwrap();
    let spec = spectrum(&pc);
    assert_eq!(spec.entries.len(), 2);
    assert!(spec.entries.iter().all(|e| (e.lambda - 1.0).norm() < 1e-12));

    let pc = dephasing(ScalarFn::constant(0.0), ScalarFn::constant(PI / 4.0), 0.0).unwrap();
    let spec = spectrum(&pc);
    let v = sorted_values(&spec);
    let (c, s) = ((PI / 4.0).cos(), (PI / 4.0).sin());
    let want = [c64(c, -s), c64(1.0, 0.0), c64(1.0, 0.0), c64(c, s)];
    for (a, b) in v.iter().zip(&want) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn qutrit_peripheral_pair() {
    let spec = spectrum(&qutrit_decay(0.0).unwrap());
    let v = sorted_values(&spec);
    assert_eq!(v.len(), 2);
    assert!((v[0] + 1.0).norm() < 1e-12 && (v[1] - 1.0).norm() < 1e-12);
}

#[test]
fn eigenvalue_derivatives() {
    let phi = 0.7;
    let pc = dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(phi), 0.0).unwrap();
    let spec = spectrum(&pc);
    for e in &spec.entries {
        let dot = e.lambda_dot.unwrap();
        if (e.lambda - 1.0).norm() < 1e-9 {
            assert!(dot.norm() < 1e-8);
        } else {
            // (1 − 2θ)e^{±iφ} at θ = 0
            let want = e.lambda * -2.0;
            assert!((dot - want).norm() < 1e-8);
        }
    }
    let spec = spectrum(&qutrit_decay(0.0).unwrap());
    for e in &spec.entries {
        let want = if e.lambda.re < 0.0 { 2.0 } else { 0.0 };
        assert!((e.lambda_dot.unwrap() - want).norm() < 1e-8);
    }
}

#[test]
fn perturbation_matches_tracking() {
    let cases = [
        dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(0.3), 0.0).unwrap(),
        dephasing(ScalarFn::constant(0.0), ScalarFn::linear(0.2, 1.0), 0.1).unwrap(),
        qutrit_decay(0.0).unwrap(),
    ];
    for pc in &cases {
        let spec = spectrum(pc);
        for e in spec.entries.iter().filter(|e| (e.lambda - 1.0).norm() > 1e-6) {
            let tracked = tracked_eigenvalue_derivative(pc, e.lambda, 1e-6).unwrap();
            let dot = e.lambda_dot.unwrap();
            assert!((tracked - dot).norm() <= 1e-5 * dot.norm().max(1.0), "{tracked} vs {dot}");
        }
    }
}

#[test]
fn fixed_points() {
    let pc = dephasing(ScalarFn::constant(0.3), ScalarFn::constant(0.2), 0.0).unwrap();
    let fp = fixed_point(&pc.transition().unwrap()).unwrap();
    assert!(close(fp.matrix(), &CMatrix::identity(2, 2).scale(0.5), 1e-12));

    let fp = fixed_point(&qutrit_decay(0.1).unwrap().transition().unwrap()).unwrap();
    let want = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.4, 0.), c64(0.4, 0.), c64(1.0, 0.)])).unscale(1.8);
    assert!(close(fp.matrix(), &want, 1e-10));

    let u = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(-0.6, 0.8)]));
    let fp = fixed_point(&TransitionMatrix::new(unitary_transition(&u)).unwrap()).unwrap();
    assert!(close(fp.matrix(), &CMatrix::identity(3, 3).unscale(3.0), 1e-12));
}

#[test]
fn state_expansion() {
    let pc = qutrit_decay(0.1).unwrap();
    let spec = spectrum(&pc);
    let fp = fixed_point(&pc.transition().unwrap()).unwrap();
    let exp = expand_state(&spec, &fp).unwrap();
    assert!(exp.residual < 1e-10);
    for (e, a) in spec.entries.iter().zip(&exp.coefficients) {
        if e.is_fixed_point {
            assert!(a.norm() > 0.1);
        } else {
            assert!(a.norm() < 1e-10);
        }
    }

    let pc = qutrit_decay(0.0).unwrap();
    let spec = spectrum(&pc);
    let rho = qutrit_input_state(0.9).unwrap();
    let exp = expand_state(&spec, &rho).unwrap();
    assert!(exp.coefficients.iter().all(|a| a.norm() > 1e-3));
    let rebuilt = spec
        .entries
        .iter()
        .zip(&exp.coefficients)
        .fold(exp.remainder.clone(), |acc, (e, &a)| acc + &e.right * a);
    assert!((rebuilt - rho.vectorize()).norm() <= 1e-9);
    // the second eigenmatrix is proportional to diag(1/2, 1/2, -1)
    let other = spec.entries.iter().find(|e| e.lambda.re < 0.0).unwrap().eigenmatrix(3);
    let want = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.5, 0.), c64(0.5, 0.), c64(-1.0, 0.)]));
    assert!((phase_overlap(&other, &want) - 1.0).abs() < 1e-10);
}

#[test]
fn asymptotic_state_examples() {
    let pc = qutrit_decay(0.0).unwrap();
    let spec = spectrum(&pc);
    let rho = qutrit_input_state(0.5).unwrap();
    let exp = expand_state(&spec, &rho).unwrap();
    let v0 = asymptotic_state(&spec, &exp, 0);
    assert!((&v0 + &exp.remainder - rho.vectorize()).norm() < 1e-10);
    let (a, b, c) = (
        asymptotic_state(&spec, &exp, 2),
        asymptotic_state(&spec, &exp, 3),
        asymptotic_state(&spec, &exp, 4),
    );
    assert!((&a - &c).norm() < 1e-12);
    assert!((&a - &b).norm() > 1e-3);

    let pc = dephasing(ScalarFn::constant(0.2), ScalarFn::constant(0.4), 0.0).unwrap();
    let spec = spectrum(&pc);
    let mut r = rng(11);
    let exp = expand_state(&spec, &random_state(&mut r, 2)).unwrap();
    assert!((asymptotic_state(&spec, &exp, 1) - asymptotic_state(&spec, &exp, 17)).norm() < 1e-12);

    // away from θ = 0 the non-peripheral part decays like 0.8^n
    let pc = qutrit_decay(0.1).unwrap();
    let spec = spectrum(&pc);
    let rho = qutrit_input_state(0.5).unwrap();
    let exp = expand_state(&spec, &rho).unwrap();
    let t = pc.transition().unwrap();
    let mut v = rho.vectorize();
    for _ in 0..200 {
        v = t.matrix() * v;
    }
    assert!((v - asymptotic_state(&spec, &exp, 200)).norm() <= 1e-8);
}

#[test]
fn invariants_on_scenarios() {
    let chans = [
        dephasing(ScalarFn::linear(0.0, 1.0), ScalarFn::constant(PI / 4.0), 0.0).unwrap(),
        dephasing(ScalarFn::constant(0.1), ScalarFn::constant(PI / 4.0), 0.0).unwrap(),
        qutrit_decay(0.0).unwrap(),
        qutrit_decay(0.25).unwrap(),
        heisenberg_noisy(&HeisenbergParams::default()).unwrap(),
        heisenberg_common_w(1.0, [0.1, 0.2, 0.3], 0.4, 0.5).unwrap(),
    ];
    for pc in &chans {
        check_invariants(&spectrum(pc));
    }
}

#[test]
fn near_peripheral_eigenvalues_warn() {
    let pc = dephasing(ScalarFn::constant(1e-6), ScalarFn::constant(0.3), 0.0).unwrap();
    let spec = spectrum(&pc);
    assert_eq!(spec.entries.len(), 2);
    assert_eq!(spec.near_peripheral.len(), 2);
    assert!(!spec.warnings.is_empty());
}
