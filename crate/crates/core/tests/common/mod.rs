#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqmetro::channels::DensityMatrix;
use seqmetro::numerics::{c64, CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre(r: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

/// Haar-ish unitary from the QR factor of a complex Gaussian-like matrix.
pub fn random_unitary(r: &mut impl Rng, d: usize) -> CMatrix {
    let qr = ginibre(r, d, d).qr();
    let (q, rr) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&rr.diagonal().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }));
    q * phases
}

pub fn random_hermitian(r: &mut impl Rng, d: usize) -> CMatrix {
    let a = ginibre(r, d, d);
    (&a + a.adjoint()).unscale(2.0)
}

/// Full-rank state `(A A† + ε I) / Tr`.
pub fn random_state(r: &mut impl Rng, d: usize) -> DensityMatrix {
    let a = ginibre(r, d, d);
    let m = &a * a.adjoint() + CMatrix::identity(d, d).scale(0.05);
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

/// Kraus operators of a random channel with `k` operators, from a random
/// isometry `d → k·d`.
pub fn random_kraus(r: &mut impl Rng, d: usize, k: usize) -> Vec<CMatrix> {
    let v = random_unitary(r, k * d).columns(0, d).into_owned();
    (0..k).map(|i| v.rows(i * d, d).into_owned()).collect()
}

pub fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// `|⟨a, b⟩| / (‖a‖‖b‖)`: 1 when equal up to a phase.
pub fn phase_overlap(a: &CMatrix, b: &CMatrix) -> f64 {
    let ip: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    ip.norm() / (a.norm() * b.norm())
}
