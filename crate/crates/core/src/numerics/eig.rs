use super::{fix_phase_vector, svd, CMatrix, CVector, C64, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};

/// One eigenvalue of a general square matrix with its eigenvectors.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: C64,
    /// Unit-norm right eigenvector.
    pub right: CVector,
    /// Left eigenvector scaled so that `left† · right = 1`.
    ///
    /// Only present for simple, non-defective eigenvalues.
    pub left: Option<CVector>,
    /// Index of the eigenvalue cluster this pair belongs to.
    pub cluster: usize,
    /// Number of eigenvalues in the cluster.
    pub cluster_size: usize,
}

impl EigPair {
    pub fn is_degenerate(&self) -> bool {
        self.left.is_none()
    }
}

/// Right and left eigenspace of an eigenvalue cluster.
///
/// When `semisimple` holds, the columns satisfy `left† · right = I`.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: C64,
    pub right: CMatrix,
    pub left: CMatrix,
    pub semisimple: bool,
}

const QR_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigen-decomposition of a general complex matrix using the default cluster
/// tolerance.
pub fn eig_general(a: &CMatrix) -> Result<Vec<EigPair>> {
    eig_general_with(a, DEFAULT_CLUSTER_TOL)
}

/// Eigenvalues sorted by descending modulus (ties: descending real part, then
/// descending imaginary part), each with a right eigenvector.
///
/// Eigenvectors come from the singular vectors of `a − λI` that belong to its
/// smallest singular values: the right singular vectors span the right
/// eigenspace and the left singular vectors span the left eigenspace, so no
/// eigenvector matrix is ever inverted.
pub fn eig_general_with(a: &CMatrix, cluster_tol: f64) -> Result<Vec<EigPair>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.nrows()),
            found: a.shape(),
        });
    }
    if !super::is_finite(a) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut values = schur_eigenvalues(a)?;
    sort_spectrum(&mut values);
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let clusters = cluster(&values, cluster_tol * scale);

    let mut out = Vec::with_capacity(n);
    for (cid, members) in clusters.iter().enumerate() {
        let mean = members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64;
        let space = eigenspace_impl(a, mean, members.len())?;
        let k = space.right.ncols();
        for (slot, &i) in members.iter().enumerate() {
            let col = slot % k;
            let right = space.right.column(col).into_owned();
            let left = if members.len() == 1 && space.semisimple {
                Some(space.left.column(col).into_owned())
            } else {
                None
            };
            out.push(EigPair {
                value: values[i],
                right,
                left,
                cluster: cid,
                cluster_size: members.len(),
            });
        }
    }
    Ok(out)
}

/// Right/left eigenspace of `a` at `value` for an eigenvalue of algebraic
/// multiplicity `multiplicity`.
pub fn eigenspace(a: &CMatrix, value: C64, multiplicity: usize) -> Result<Eigenspace> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (a.nrows(), a.nrows()),
            found: a.shape(),
        });
    }
    if multiplicity == 0 || multiplicity > a.nrows() {
        return Err(Error::InvalidInput(format!(
            "multiplicity {multiplicity} out of range for a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    eigenspace_impl(a, value, multiplicity)
}

fn eigenspace_impl(a: &CMatrix, value: C64, multiplicity: usize) -> Result<Eigenspace> {
    let n = a.nrows();
    let shifted = a - CMatrix::identity(n, n) * value;
    let s = svd(&shifted)?;
    let anorm = s.singular_values[0].max(a.norm()).max(1.0);
    let null_tol = 1e-7 * anorm;
    let first = n - multiplicity;
    // Singular vectors for the `multiplicity` smallest singular values. A
    // defective cluster has fewer than `multiplicity` of them near zero.
    let null_count = s.singular_values[first..]
        .iter()
        .filter(|&&x| x <= null_tol)
        .count()
        .max(1);
    let semisimple = null_count == multiplicity;
    let take = if semisimple { multiplicity } else { null_count };
    let start = n - take;

    let mut right = s.v.columns(start, take).into_owned();
    let mut left = s.u.columns(start, take).into_owned();

    if take == 1 {
        let mut r = right.column(0).into_owned();
        fix_phase_vector(&mut r);
        right.set_column(0, &r);
    }

    let gram = left.adjoint() * &right;
    let semisimple = semisimple && {
        // A Jordan chain shows up as left and right null vectors that are
        // (nearly) orthogonal.
        let sv = gram.clone().singular_values();
        sv.iter().cloned().fold(f64::INFINITY, f64::min) > 1e-10
    };
    if semisimple {
        // left ← left · G^{-†} so that left† · right = I.
        let g_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::AlgorithmInvariantViolated("singular biorthogonal Gram".into()))?;
        left *= g_inv.adjoint();
    }
    Ok(Eigenspace {
        value,
        right,
        left,
        semisimple,
    })
}

fn sort_key(z: &C64) -> (i64, i64, i64) {
    let q = |x: f64| (x * 1e9).round() as i64;
    (q(z.norm()), q(z.re), q(z.im))
}

pub(crate) fn sort_spectrum(values: &mut [C64]) {
    values.sort_by_key(|z| std::cmp::Reverse(sort_key(z)));
}

/// Single-linkage clustering, preserving the order of first appearance.
fn cluster(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(slot) => groups[slot].push(i),
            None => {
                root_slot[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Eigenvalues via Householder reduction to Hessenberg form followed by
/// shifted QR sweeps with deflation.
fn schur_eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.nrows();
    let mut h = a.clone();
    hessenberg(&mut h);
    let anorm = h.norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                s = anorm;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > QR_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NonConvergence {
                routine: "complex Hessenberg QR",
                iterations: total,
            });
        }
        let shift = if iter.is_multiple_of(10) {
            // exceptional shift
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(values)
}

fn hessenberg(h: &mut CMatrix) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x = h.view((k + 1, k), (n - k - 1, 1)).into_owned();
        let alpha = x.norm();
        if alpha == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v = x;
        v[0] += phase * alpha;
        let vnorm2 = v.norm_squared();
        if vnorm2 == 0.0 {
            continue;
        }
        // H ← (I − 2vv†/‖v‖²) H on rows k+1.., then H (I − 2vv†/‖v‖²) on columns k+1..
        let rows = h.rows(k + 1, n - k - 1).into_owned();
        let w = v.adjoint() * &rows;
        let update = &v * w * C64::new(2.0 / vnorm2, 0.0);
        h.rows_mut(k + 1, n - k - 1).zip_apply(&update, |a, b| *a -= b);
        let cols = h.columns(k + 1, n - k - 1).into_owned();
        let w = &cols * &v;
        let update = w * v.adjoint() * C64::new(2.0 / vnorm2, 0.0);
        h.columns_mut(k + 1, n - k - 1).zip_apply(&update, |a, b| *a -= b);
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens rotation `G = [[c, s], [−s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if x.norm() == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let c = x.norm() / r;
    let s = (x / x.norm()) * y.conj() / r;
    (c, s)
}

/// One explicitly shifted QR sweep `H − μI = QR, H ← RQ + μI` restricted to
/// the active window `lo..=hi`.
fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, mu: C64) {
    for k in lo..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let p = h[(k, j)];
            let q = h[(k + 1, j)];
            h[(k, j)] = p * c + s * q;
            h[(k + 1, j)] = -s.conj() * p + q * c;
        }
        h[(k + 1, k)] = C64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (idx, k) in (lo..hi).enumerate() {
        let (c, s) = rots[idx];
        for i in lo..=(k + 1).min(hi) {
            let p = h[(i, k)];
            let q = h[(i, k + 1)];
            h[(i, k)] = p * c + q * s.conj();
            h[(i, k + 1)] = -p * s + q * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += mu;
    }
}
