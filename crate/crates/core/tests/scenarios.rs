mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use seqmetro::channels::*;
use seqmetro::numerics::{c64, eig_general, eig_hermitian, CMatrix, CVector, C64};
use seqmetro::scenarios::*;

fn sorted_eigs(t: &CMatrix) -> Vec<C64> {
    let mut v: Vec<C64> = eig_general(t).unwrap().into_iter().map(|p| p.value).collect();
    v.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    v
}

fn assert_eigs(t: &CMatrix, want: &[C64]) {
    let got = sorted_eigs(t);
    let mut want = want.to_vec();
    want.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).norm() < 1e-10, "{got:?} vs {want:?}");
    }
}

fn check_channel(pc: &ParamChannel, r: &mut impl Rng) {
    let t = pc.transition().unwrap();
    assert!(t.trace_preservation_residual() <= 1e-10);
    let eigs = sorted_eigs(t.matrix());
    assert!(eigs.iter().all(|l| l.norm() <= 1.0 + 1e-9));
    assert!(eigs.iter().any(|l| (l - 1.0).norm() <= 1e-9));
    TransitionMatrix::from_untrusted(t.matrix().clone()).unwrap();
    if let Some(k) = pc.kraus() {
        let k = k.unwrap();
        assert!(k.completeness_residual() <= 1e-10);
        for _ in 0..3 {
            let rho = random_state(r, pc.dim());
            assert!(close(&t.apply(rho.matrix()).unwrap(), &k.apply(rho.matrix()), 1e-10));
        }
    }
}

fn random_heisenberg(r: &mut impl Rng) -> HeisenbergParams {
    let mut p = [r.gen_range(0.0..0.4), r.gen_range(0.0..0.3), r.gen_range(0.0..0.3)];
    if p.iter().sum::<f64>() > 1.0 {
        p[0] = 0.0;
    }
    HeisenbergParams {
        t: r.gen_range(0.1..2.0),
        p,
        phi: [0; 4].map(|_| r.gen_range(0.0..2.0 * PI)),
        theta0: r.gen_range(-1.0..1.0),
    }
}

#[test]
fn dephasing_spectra() {
    let pc = dephasing(ScalarFn::constant(0.1), ScalarFn::constant(PI / 4.0), 0.0).unwrap();
    let one = c64(1.0, 0.0);
    let rot = C64::from_polar(0.8, PI / 4.0);
    assert_eigs(pc.transition().unwrap().matrix(), &[one, one, rot, rot.conj()]);

    let pc = dephasing(ScalarFn::constant(0.5), ScalarFn::constant(0.9), 0.0).unwrap();
    let zero = c64(0.0, 0.0);
    assert_eigs(pc.transition().unwrap().matrix(), &[one, one, zero, zero]);

    let pc = dephasing(ScalarFn::constant(0.0), ScalarFn::constant(0.0), 0.0).unwrap();
    assert!(close(pc.transition().unwrap().matrix(), &CMatrix::identity(4, 4), 1e-15));

    assert!(dephasing(ScalarFn::constant(1.2), ScalarFn::constant(0.0), 0.0).is_err());
}

#[test]
fn qutrit_structure() {
    let pc = qutrit_decay(0.0).unwrap();
    let nonzero: Vec<C64> = sorted_eigs(pc.transition().unwrap().matrix())
        .into_iter()
        .filter(|l| l.norm() > 1e-8)
        .collect();
    assert_eq!(nonzero.len(), 2);
    assert!(nonzero.iter().any(|l| (l + 1.0).norm() < 1e-10));

    let k = qutrit_decay(0.2).unwrap().kraus().unwrap().unwrap();
    assert!(k.completeness_residual() <= 1e-12);

    let pc = qutrit_decay(0.3).unwrap();
    let t = pc.transition().unwrap();
    let other = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.5, 0.), c64(0.5, 0.), c64(-1.0, 0.)]));
    let image = t.apply(&other).unwrap();
    assert!(close(&image, &other.scale(-1.0 + 0.6), 1e-12));

    assert!(qutrit_decay(0.6).is_err());
    assert!(qutrit_decay(-0.1).is_err());
}

#[test]
fn qutrit_derivative_matches_forward_difference() {
    for th in [0.0, 0.1, 0.25] {
        let pc = qutrit_decay(th).unwrap();
        let analytic = pc.derivative().unwrap();
        let numeric = derivative(&pc.clone().with_mode(DerivativeMode::OneSidedDifference(1e-7))).unwrap();
        assert!((&analytic - &numeric).norm() <= 1e-6, "θ₀ = {th}");
    }
}

#[test]
fn heisenberg_noise_forms_agree() {
    let mut r = rng(51);
    for _ in 0..20 {
        let hp = random_heisenberg(&mut r);
        let explicit = heisenberg_noise_transition(hp.p, hp.phi);
        let built = kraus_to_transition(&heisenberg_noise_kraus(hp.p, hp.phi).unwrap());
        assert!(close(built.matrix(), &explicit, 1e-10));
    }
}

#[test]
fn heisenberg_noise_examples() {
    let explicit = heisenberg_noise_transition([0.0; 3], [0.0; 4]);
    assert!(close(&explicit, &unitary_transition(&w_unitary(0.0)), 1e-15));

    let (p, phi) = ([0.1, 0.2, 0.3], [0.3, 0.7, 1.1, 1.9]);
    let t = TransitionMatrix::new(heisenberg_noise_transition(p, phi)).unwrap();
    assert!(t.trace_preservation_residual() <= 1e-10);
    assert!(unitality_check(&t));
    // first row carries ω₁ and ω₂ at the two ends
    assert!((t.matrix()[(0, 0)] - 0.7).norm() < 1e-15);
    assert!((t.matrix()[(0, 15)] - 0.3).norm() < 1e-15);

    let bad = HeisenbergParams {
        p: [0.5, 0.4, 0.3],
        ..HeisenbergParams::default()
    };
    assert!(heisenberg_noisy(&bad).is_err());
}

#[test]
fn heisenberg_input_states() {
    let (t, th) = (1.0, 0.5);
    let rho = heisenberg_input_state(t, th, 0.2).unwrap();
    let (w, _) = eig_hermitian(rho.matrix()).unwrap();
    let mut w = w;
    w.sort_by(f64::total_cmp);
    for (a, b) in w.iter().zip([0.05, 0.05, 0.45, 0.45]) {
        assert!((a - b).abs() < 1e-12);
    }
    let r1 = heisenberg_signal_eigenmatrix(t, th).unwrap();
    let want = CMatrix::identity(4, 4).scale(0.25) + (&r1 + r1.adjoint()).scale(0.2);
    assert!(close(rho.matrix(), &want, 1e-12));

    let tiny = heisenberg_input_state(t, th, 1e-12).unwrap();
    assert!(close(tiny.matrix(), &CMatrix::identity(4, 4).scale(0.25), 1e-10));
    assert!(heisenberg_input_state(t, th, 0.3).is_err());
    assert!(heisenberg_input_state(t, th, 0.0).is_err());
}

fn max_n2(rep: &seqmetro::qfi::AsymptoticQfiReport) -> f64 {
    rep.n2_by_residue.iter().copied().fold(rep.n2_coefficient, f64::max)
}

#[test]
fn second_qubit_preparation_is_irrelevant() {
    let setup = RobustnessSetup::default();
    let reps = robustness_sweep(&setup, &[[0.0; 3], [0.0, 0.0, 1.0]]).unwrap();
    assert!(reps[0].n2_coefficient > 0.0);
    assert!((reps[0].n2_coefficient - reps[1].n2_coefficient).abs() <= 1e-8);

    let mut r = rng(52);
    let blochs: Vec<[f64; 3]> = (0..10)
        .map(|_| {
            let v = [0; 3].map(|_| r.gen_range(-1.0..1.0));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let len: f64 = r.gen_range(0.0..1.0);
            v.map(|x| x / n * len)
        })
        .collect();
    let n2: Vec<f64> = robustness_sweep(&setup, &blochs)
        .unwrap()
        .iter()
        .map(|rep| rep.n2_coefficient)
        .collect();
    let spread = n2.iter().copied().fold(f64::MIN, f64::max) - n2.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread <= 1e-8, "{n2:?}");

    let uncontrolled = RobustnessSetup {
        controlled: false,
        ..setup
    };
    for rep in robustness_sweep(&uncontrolled, &blochs).unwrap() {
        assert!(max_n2(&rep) < 1e-10);
    }
}

#[test]
fn scenario_channels_are_valid() {
    let mut r = rng(53);
    for _ in 0..10 {
        let p: f64 = r.gen_range(0.0..1.0);
        let pc = dephasing(
            ScalarFn::constant(p),
            ScalarFn::linear(r.gen_range(0.0..PI), r.gen_range(-1.0..1.0)),
            r.gen_range(-1.0..1.0),
        )
        .unwrap();
        check_channel(&pc, &mut r);
        check_channel(&qutrit_decay(r.gen_range(0.0..0.5)).unwrap(), &mut r);
        let hp = random_heisenberg(&mut r);
        check_channel(&heisenberg_noisy(&hp).unwrap(), &mut r);
    }
}

#[test]
fn named_scenarios() {
    for name in ["dephasing", "qutrit-decay", "heisenberg"] {
        let kind = ScenarioName::parse(name).unwrap();
        assert_eq!(kind.as_str(), name);
        let pc = ScenarioSpec::new(kind, 0.0).build().unwrap();
        check_channel(&pc, &mut rng(54));
    }
    let mut spec = ScenarioSpec::new(ScenarioName::QutritDecay, 0.0);
    assert!(spec.set("nonsense", 1.0).is_err());
    let mut spec2 = ScenarioSpec::new(ScenarioName::Dephasing, 0.0);
    spec2.set("p0", 2.0).unwrap();
    assert!(spec2.build().is_err());
    spec = ScenarioSpec::new(ScenarioName::QutritDecay, 0.7);
    assert!(spec.build().is_err());
}
