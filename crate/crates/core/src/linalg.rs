//! Dense complex linear algebra used throughout the crate.
//!
//! LU and QR come from `nalgebra`. The SVD is a one-sided Jacobi iteration:
//! `nalgebra`'s complex SVD loses several digits in its singular vectors,
//! which the subspace computations cannot afford. The Schur decomposition is
//! our own single-shift complex QR iteration: it always produces a genuinely
//! upper triangular factor (no 2x2 bumps) and we need to reorder it, which
//! `nalgebra` does not offer.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

const EPS: f64 = f64::EPSILON;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a complex matrix from real rows.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| c64(rows[i][j], 0.0))
}

/// Builds a complex vector from real entries.
pub fn real_vector(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| c64(x, 0.0)))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Full singular value decomposition `m = u·diag(s)·vᴴ` with `u`, `v`
/// unitary and singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    let mut g = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let gabs = gamma.norm();
                if gabs == 0.0 || gabs <= EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                jacobi_rotate(&mut g, p, q, c, s, phase);
                jacobi_rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let smax = order.first().map_or(0.0, |&j| norms[j]);
    let keep = order.iter().take_while(|&&j| norms[j] > EPS * smax * rows as f64 && norms[j] > 0.0).count();
    let mut u = CMatrix::zeros(rows, rows);
    for (k, &j) in order[..keep].iter().enumerate() {
        u.set_column(k, &(g.column(j) / c64(norms[j], 0.0)));
    }
    if keep < rows {
        let mut seed = CMatrix::zeros(rows, keep + rows);
        seed.view_mut((0, 0), (rows, keep)).copy_from(&u.columns(0, keep));
        seed.view_mut((0, keep), (rows, rows)).copy_from(&CMatrix::identity(rows, rows));
        let q = seed.qr().q();
        u.columns_mut(keep, rows - keep).copy_from(&q.columns(keep, rows - keep));
    }
    let mut vs = CMatrix::zeros(cols, cols);
    for (k, &j) in order.iter().enumerate() {
        vs.set_column(k, &v.column(j));
    }
    Svd { u, singular_values: order.iter().map(|&j| norms[j]).collect(), v: vs }
}

// [x_p, x_q] ← [c·x_p − s·φ̄·x_q, s·φ·x_p + c·x_q] on columns p, q
fn jacobi_rotate(m: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase.conj();
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = (xp * s + xq * c) * phase;
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).singular_values
}

/// Spectral norm; zero for empty matrices.
pub fn norm2(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix. An empty matrix is treated as
/// trivially invertible and reports `+inf`.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return f64::INFINITY;
    }
    let s = singular_values(m);
    if m.nrows() != m.ncols() {
        return 0.0;
    }
    s.last().copied().unwrap_or(0.0)
}

/// 2-norm condition number (`+inf` when singular, 1 for empty).
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let s = singular_values(m);
    let lo = *s.last().unwrap();
    if lo == 0.0 {
        f64::INFINITY
    } else {
        s[0] / lo
    }
}

/// Inverse via LU with partial pivoting. `None` when singular or non-finite.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    let inv = m.clone().lu().try_inverse()?;
    is_finite(&inv).then_some(inv)
}

/// Determinant via LU.
pub fn determinant(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return c64(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Makes the first significant entry of every column real and positive.
///
/// Bases are only defined up to a unimodular factor per column; this pins
/// the factor so output is reproducible and 1-dimensional bases come out in
/// their "natural" orientation.
pub fn normalize_phases(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let amax = col.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if amax == 0.0 {
            continue;
        }
        if let Some(pivot) = col.iter().copied().find(|z| z.norm() > 1e-8 * amax) {
            let phase = pivot.conj() / pivot.norm();
            col.iter_mut().for_each(|z| *z *= phase);
        }
    }
}

/// Orthonormal basis of the column span of `m` (assumed full column rank),
/// via thin QR, with phases normalized.
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let mut q = m.clone().qr().q();
    normalize_phases(&mut q);
    q
}

/// Complex Schur decomposition `a = q t qᴴ` with `t` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal().iter().copied().collect()
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, c64(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

/// Applies the rotation to rows `k`, `k+1` of `m` over the columns `cols`.
fn rotate_rows(m: &mut CMatrix, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

/// Multiplies columns `k`, `k+1` of `m` (rows `rows`) by the adjoint rotation.
fn rotate_cols(m: &mut CMatrix, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + b * s.conj();
        m[(i, k + 1)] = -a * s + b * c;
    }
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x = h.view((k + 1, k), (n - k - 1, 1)).clone_owned();
        let xnorm = x.norm();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 { c64(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v = x;
        v[0] += phase * xnorm;
        let vn = v.norm();
        if vn == 0.0 {
            continue;
        }
        v /= c64(vn, 0.0);
        let two = c64(2.0, 0.0);
        // H <- (I - 2vvᴴ) H (I - 2vvᴴ), acting on rows/cols k+1..n
        let rows = h.rows(k + 1, n - k - 1).clone_owned();
        let w = v.adjoint() * &rows;
        h.rows_mut(k + 1, n - k - 1).sub_assign_rank1(&v, &w, two);
        let cols = h.columns(k + 1, n - k - 1).clone_owned();
        let w = &cols * &v;
        h.columns_mut(k + 1, n - k - 1).sub_assign_rank1(&w, &v.adjoint(), two);
        let qcols = q.columns(k + 1, n - k - 1).clone_owned();
        let w = &qcols * &v;
        q.columns_mut(k + 1, n - k - 1).sub_assign_rank1(&w, &v.adjoint(), two);
        for i in (k + 2)..n {
            h[(i, k)] = c64(0.0, 0.0);
        }
    }
    (q, h)
}

trait Rank1 {
    fn sub_assign_rank1(&mut self, u: &CMatrix, w: &CMatrix, scale: Complex64);
}

impl<S> Rank1 for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::Dyn, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
{
    fn sub_assign_rank1(&mut self, u: &CMatrix, w: &CMatrix, scale: Complex64) {
        for j in 0..self.ncols() {
            for i in 0..self.nrows() {
                self[(i, j)] -= scale * u[(i, 0)] * w[(0, j)];
            }
        }
    }
}

/// Complex Schur decomposition by Hessenberg reduction and shifted QR.
///
/// Returns `None` only if the iteration fails to converge, which has not
/// been observed on finite input.
pub fn schur(a: &CMatrix) -> Option<Schur> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "schur needs a square matrix");
    if n == 0 {
        return Some(Schur { q: CMatrix::zeros(0, 0), t: CMatrix::zeros(0, 0) });
    }
    if !is_finite(a) {
        return None;
    }
    let (mut q, mut t) = hessenberg(a);
    let anorm = t.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let small = f64::MIN_POSITIVE / EPS;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let mut diag = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = anorm;
            }
            if sub <= EPS * diag || sub <= small {
                t[(lo, lo - 1)] = c64(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n.max(10) {
            return None;
        }
        let a11 = t[(hi - 1, hi - 1)];
        let a12 = t[(hi - 1, hi)];
        let a21 = t[(hi, hi - 1)];
        let a22 = t[(hi, hi)];
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift
            a22 + c64(0.75 * a21.norm(), 0.0)
        } else {
            let half = (a11 - a22) * 0.5;
            let disc = (half * half + a12 * a21).sqrt();
            let m1 = (a11 + a22) * 0.5 + disc;
            let m2 = (a11 + a22) * 0.5 - disc;
            if (m1 - a22).norm() < (m2 - a22).norm() {
                m1
            } else {
                m2
            }
        };
        let mut x = t[(lo, lo)] - mu;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let first_col = if k > lo { k - 1 } else { lo };
            rotate_rows(&mut t, k, c, s, first_col..n);
            let last_row = (k + 2).min(hi);
            rotate_cols(&mut t, k, c, s, 0..last_row + 1);
            rotate_cols(&mut q, k, c, s, 0..n);
            if k > lo {
                t[(k + 1, k - 1)] = c64(0.0, 0.0);
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = c64(0.0, 0.0);
        }
    }
    Some(Schur { q, t })
}

/// Eigenvalues of a square matrix via [`schur`].
pub fn eigenvalues(a: &CMatrix) -> Option<Vec<Complex64>> {
    schur(a).map(|s| s.eigenvalues())
}

/// Swaps the adjacent diagonal entries `k` and `k+1` of the triangular factor.
fn swap_adjacent(s: &mut Schur, k: usize) {
    let n = s.t.nrows();
    let a = s.t[(k, k)];
    let b = s.t[(k + 1, k + 1)];
    let c = s.t[(k, k + 1)];
    // (c, b - a) spans the eigenvector of the 2x2 block for eigenvalue b
    let (cs, sn) = givens(c, b - a);
    rotate_rows(&mut s.t, k, cs, sn, k..n);
    rotate_cols(&mut s.t, k, cs, sn, 0..k + 2);
    rotate_cols(&mut s.q, k, cs, sn, 0..n);
    s.t[(k + 1, k)] = c64(0.0, 0.0);
    s.t[(k, k)] = b;
    s.t[(k + 1, k + 1)] = a;
}

/// Reorders the Schur form so that every eigenvalue with `select(λ)` comes
/// first. Returns the number of selected eigenvalues.
pub fn reorder_schur(s: &mut Schur, select: impl Fn(Complex64) -> bool) -> usize {
    let n = s.t.nrows();
    let mut placed = 0;
    for j in 0..n {
        if select(s.t[(j, j)]) {
            let mut k = j;
            while k > placed {
                swap_adjacent(s, k - 1);
                k -= 1;
            }
            placed += 1;
        }
    }
    placed
}

/// Solves `t11 x - x t22 = rhs` for upper triangular `t11`, `t22` with
/// disjoint spectra.
pub fn triangular_sylvester(t11: &CMatrix, t22: &CMatrix, rhs: &CMatrix) -> CMatrix {
    let p = t11.nrows();
    let q = t22.nrows();
    let mut x = CMatrix::zeros(p, q);
    for j in 0..q {
        let mut b: Vec<Complex64> = (0..p).map(|i| rhs[(i, j)]).collect();
        for l in 0..j {
            let tl = t22[(l, j)];
            if tl != c64(0.0, 0.0) {
                for (i, bi) in b.iter_mut().enumerate() {
                    *bi += x[(i, l)] * tl;
                }
            }
        }
        let shift = t22[(j, j)];
        for i in (0..p).rev() {
            let mut acc = b[i];
            for k in (i + 1)..p {
                acc -= t11[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / (t11[(i, i)] - shift);
        }
    }
    x
}

/// Unit-norm eigenvectors `v` (columns) of the matrix with Schur form `s`,
/// ordered like the diagonal of `s.t`. Near-repeated eigenvalues produce
/// nearly parallel columns; callers detect that through the condition number.
pub fn eigenvectors(s: &Schur) -> CMatrix {
    let n = s.t.nrows();
    let t = &s.t;
    let tnorm = t.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let smin = (EPS * tnorm).max(f64::MIN_POSITIVE);
    let mut w = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        w[(k, k)] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = t[(i, k)];
            for j in (i + 1)..k {
                acc += t[(i, j)] * w[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = c64(smin, 0.0);
            }
            w[(i, k)] = -acc / d;
        }
    }
    let mut v = &s.q * w;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= c64(nrm, 0.0);
        }
    }
    v
}

/// Bottleneck distance between two multisets of complex numbers: the
/// smallest `d` such that a perfect matching exists using only pairs at
/// distance `<= d`. Infinite when the sizes differ.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a.len();
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut cands: Vec<f64> = dist.iter().flatten().copied().collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let feasible = |d: f64| -> bool {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for i in 0..n {
            let mut seen = vec![false; n];
            if !augment(i, d, &dist, &mut seen, &mut owner) {
                return false;
            }
        }
        true
    };
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

fn augment(i: usize, d: f64, dist: &[Vec<f64>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for j in 0..dist.len() {
        if dist[i][j] <= d && !seen[j] {
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, d, dist, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &CMatrix, s: &Schur) -> f64 {
        norm2(&(a - &s.q * &s.t * s.q.adjoint()))
    }

    fn lcg_matrix(n: usize, mut seed: u64) -> CMatrix {
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, n, |_, _| c64(next(), next()))
    }

    fn check_svd(a: &CMatrix, tol: f64) {
        let d = svd(a);
        let (m, n) = a.shape();
        let mut sigma = CMatrix::zeros(m, n);
        for (k, &s) in d.singular_values.iter().enumerate() {
            sigma[(k, k)] = c64(s, 0.0);
        }
        let scale = d.singular_values.first().copied().unwrap_or(0.0).max(1.0);
        let recon = (&d.u * sigma * d.v.adjoint() - a).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        assert!(recon < tol * scale, "reconstruction {recon:e}");
        let ortho = |q: &CMatrix| (q.adjoint() * q - CMatrix::identity(q.ncols(), q.ncols()))
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        assert!(ortho(&d.u) < tol && ortho(&d.v) < tol);
        assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_is_accurate() {
        for n in 1..10 {
            check_svd(&lcg_matrix(n, 3 + n as u64), 1e-14);
        }
        let low_rank = {
            let b = lcg_matrix(6, 99).columns(0, 2).into_owned();
            &b * b.adjoint()
        };
        check_svd(&low_rank, 1e-14);
        assert!(singular_values(&low_rank)[2] < 1e-14);
        check_svd(&CMatrix::zeros(3, 3), 1e-15);
        check_svd(&lcg_matrix(5, 1).rows(0, 3).into_owned(), 1e-14);
        check_svd(&lcg_matrix(5, 2).columns(0, 2).into_owned(), 1e-14);
        let s = singular_values(&real_matrix(&[&[3.0, 0.0], &[4.0, 0.0]]));
        assert!((s[0] - 5.0).abs() < 1e-15 && s[1] == 0.0);
    }

    #[test]
    fn schur_of_random_matrices_is_triangular_and_reconstructs() {
        for n in 1..12 {
            let a = lcg_matrix(n, 17 + n as u64);
            let s = schur(&a).unwrap();
            assert!(residual(&a, &s) < 1e-12 * (1.0 + norm2(&a)), "n={n}");
            let unitary = norm2(&(s.q.adjoint() * &s.q - CMatrix::identity(n, n)));
            assert!(unitary < 1e-13);
            for j in 0..n {
                for i in j + 1..n {
                    assert_eq!(s.t[(i, j)], c64(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn schur_handles_real_matrix_with_complex_pair() {
        // rotation generator: eigenvalues ±i
        let a = real_matrix(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((ev[0] - c64(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c64(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn schur_of_jordan_block_and_zero() {
        let j = real_matrix(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]]);
        let s = schur(&j).unwrap();
        assert!(residual(&j, &s) < 1e-13);
        let z = CMatrix::zeros(4, 4);
        let s = schur(&z).unwrap();
        assert!(s.eigenvalues().iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn reorder_moves_selected_eigenvalues_first() {
        let a = lcg_matrix(7, 5);
        let mut s = schur(&a).unwrap();
        let k = reorder_schur(&mut s, |z| z.re < 0.0);
        let ev = s.eigenvalues();
        assert!(ev[..k].iter().all(|z| z.re < 0.0));
        assert!(ev[k..].iter().all(|z| z.re >= 0.0));
        assert!(residual(&a, &s) < 1e-12);
    }

    #[test]
    fn sylvester_solution_satisfies_equation() {
        let a = lcg_matrix(6, 9);
        let mut s = schur(&a).unwrap();
        let k = reorder_schur(&mut s, |z| z.re < 0.0);
        let t11 = s.t.view((0, 0), (k, k)).clone_owned();
        let t22 = s.t.view((k, k), (6 - k, 6 - k)).clone_owned();
        let rhs = s.t.view((0, k), (k, 6 - k)).clone_owned();
        let x = triangular_sylvester(&t11, &t22, &rhs);
        assert!(norm2(&(&t11 * &x - &x * &t22 - rhs)) < 1e-12);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let a = lcg_matrix(5, 3);
        let s = schur(&a).unwrap();
        let v = eigenvectors(&s);
        let lam = CMatrix::from_diagonal(&CVector::from_vec(s.eigenvalues()));
        assert!(norm2(&(&a * &v - &v * lam)) < 1e-12);
    }

    #[test]
    fn matching_distance_is_bottleneck() {
        let a = [c64(0.0, 0.0), c64(1.0, 0.0)];
        let b = [c64(1.1, 0.0), c64(0.05, 0.0)];
        assert!((matching_distance(&a, &b) - 0.1).abs() < 1e-15);
        assert!(matching_distance(&a, &b[..1]).is_infinite());
        assert_eq!(matching_distance(&[], &[]), 0.0);
    }

    #[test]
    fn phases_are_normalized() {
        let mut m = CMatrix::from_column_slice(2, 1, &[c64(0.0, -1.0), c64(0.0, 2.0)]);
        normalize_phases(&mut m);
        assert!((m[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 0)] - c64(-2.0, 0.0)).norm() < 1e-15);
    }
}
