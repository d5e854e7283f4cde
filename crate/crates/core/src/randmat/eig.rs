//! Hermitian eigendecomposition through the real symmetric embedding, and
//! general complex eigenvalues by Hessenberg reduction and shifted QR.

use num_complex::Complex64;

use super::{ComplexMatrix, Structure};
use crate::matrix::Matrix;
use crate::spectra::{eigh, eigvalsh, DEFAULT_EIGH_TOL};
use crate::{Error, Result};

/// Largest order accepted by [`eig_general`].
pub const EIG_GENERAL_CAP: usize = 1200;
const HERMITIAN_TOL: f64 = 1e-10;
const MAX_QR_ITER: usize = 60;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending real eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let scale = m.max_abs().max(1.0);
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::domain(format!(
            "matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:e}"
        )));
    }
    Ok(())
}

/// `[[A, -B], [B, A]]` for `M = A + iB`; each eigenvalue of `M` appears twice.
fn real_embedding(m: &ComplexMatrix) -> Matrix<f64> {
    let n = m.n();
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        // Average with the mirrored entry so the embedding is exactly symmetric.
        let z = 0.5 * (m[(i % n, j % n)] + m[(j % n, i % n)].conj());
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let doubled = eigvalsh(&real_embedding(m), DEFAULT_EIGH_TOL)?;
    Ok(doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.n();
    let e = eigh(&real_embedding(m), DEFAULT_EIGH_TOL)?;
    let scale = e.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let gap = 1e-8 * scale;

    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n && e.values[end] - e.values[end - 1] <= gap {
            end += 1;
        }
        let size = end - start;
        if size % 2 == 1 {
            return Err(Error::Numerical(format!(
                "embedded spectrum has an odd cluster of {size} eigenvalues near {}",
                e.values[start]
            )));
        }
        // The cluster spans a complex subspace of half its real dimension; pick
        // a basis greedily from the candidates `x + iy` by largest residual.
        let mut candidates: Vec<Vec<Complex64>> = (start..end)
            .map(|k| (0..n).map(|i| Complex64::new(e.vectors[(i, k)], e.vectors[(i + n, k)])).collect())
            .collect();
        let first = columns.len();
        for _ in 0..size / 2 {
            for c in candidates.iter_mut() {
                for q in &columns[first..] {
                    let proj: Complex64 = q.iter().zip(c.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in c.iter_mut().zip(q) {
                        *x -= proj * y;
                    }
                }
            }
            let (best, norm) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty cluster");
            if norm < 0.5 {
                return Err(Error::Numerical(format!(
                    "could not extract a complex eigenbasis near {}",
                    e.values[start]
                )));
            }
            let q: Vec<Complex64> = candidates.swap_remove(best).into_iter().map(|z| z / norm).collect();
            columns.push(q);
        }
        let mean = e.values[start..end].iter().sum::<f64>() / size as f64;
        values.extend(std::iter::repeat_n(mean, size / 2));
        start = end;
    }
    let vectors = ComplexMatrix::from_fn(n, |i, j| columns[j][i]).with_structure(Structure::Unitary);
    Ok(HermitianEigen { values, vectors })
}

/// All eigenvalues of a square complex matrix, sorted by real then imaginary part.
///
/// The result is checked against the trace: `|Σλ - tr M| <= tol_trace`, with
/// `tol_trace = 1e-6 · N`.
pub fn eig_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if m.n() > EIG_GENERAL_CAP {
        return Err(Error::size("eig_general matrix order", EIG_GENERAL_CAP, m.n()));
    }
    eig_general_uncapped(m)
}

pub(crate) fn eig_general_uncapped(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.n();
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let mut h: Vec<Complex64> = m.as_slice().to_vec();
    hessenberg(&mut h, n);
    let mut values = hessenberg_qr(&mut h, n)?;
    let trace = m.trace();
    let sum: Complex64 = values.iter().sum();
    if (sum - trace).norm() > 1e-6 * n as f64 {
        return Err(Error::Numerical(format!(
            "eigenvalue sum {sum} differs from trace {trace} (n = {n})"
        )));
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// Householder reduction to upper Hessenberg form, in place (row-major).
fn hessenberg(h: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|r| h[r * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for r in k + 1..n {
            v[r] = h[r * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|r| v[r].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for r in k + 1..n {
            v[r] /= vnorm;
        }
        // Left: H <- (I - 2 v v*) H on rows k+1.., columns k...
        for c in s.iter_mut().skip(k) {
            *c = Complex64::new(0.0, 0.0);
        }
        for r in k + 1..n {
            let vr = v[r].conj();
            let row = &h[r * n..(r + 1) * n];
            for c in k..n {
                s[c] += vr * row[c];
            }
        }
        for r in k + 1..n {
            let f = 2.0 * v[r];
            let row = &mut h[r * n..(r + 1) * n];
            for c in k..n {
                row[c] -= f * s[c];
            }
        }
        // Right: H <- H (I - 2 v v*) on columns k+1...
        for i in 0..n {
            let row = &mut h[i * n..(i + 1) * n];
            let t: Complex64 = (k + 1..n).map(|c| row[c] * v[c]).sum();
            let f = 2.0 * t;
            for c in k + 1..n {
                row[c] -= f * v[c].conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for r in k + 2..n {
            h[r * n + k] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Single-shift QR on the active window with Wilkinson shifts; trailing 1x1
/// and 2x2 blocks are split off as they decouple.
fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let at = |i: usize, j: usize| i * n + j;
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tiny = f64::MIN_POSITIVE.max(f64::EPSILON * norm * 1e-3);
    let mut values = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let last = hi - 1;
        // Locate the top of the unreduced block ending at `last`.
        let mut lo = last;
        while lo > 0 {
            let sub = h[at(lo, lo - 1)].norm();
            let diag = h[at(lo, lo)].norm() + h[at(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * diag || sub <= tiny {
                h[at(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == last {
            values.push(h[at(last, last)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        if lo + 1 == last {
            let (l1, l2) = eig2(h[at(lo, lo)], h[at(lo, last)], h[at(last, lo)], h[at(last, last)]);
            values.push(l1);
            values.push(l2);
            hi -= 2;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_QR_ITER {
            return Err(Error::Numerical(format!(
                "QR iteration stalled: {} of {n} eigenvalues found, active block {lo}..={last}, \
                 {total} iterations, last subdiagonal {:e}",
                values.len(),
                h[at(last, last - 1)].norm()
            )));
        }
        let shift = if iter % 10 == 0 {
            // Exceptional shift to break cycles.
            h[at(last, last)] + Complex64::new(0.75 * h[at(last, last - 1)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[at(last - 1, last - 1)],
                h[at(last - 1, last)],
                h[at(last, last - 1)],
                h[at(last, last)],
            );
            let d = h[at(last, last)];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(h, n, lo, last, shift);
    }
    Ok(values)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a + d);
    let diff = 0.5 * (a - d);
    let disc = (diff * diff + b * c).sqrt();
    (half_tr + disc, half_tr - disc)
}

fn qr_step(h: &mut [Complex64], n: usize, lo: usize, hi: usize, mu: Complex64) {
    let at = |i: usize, j: usize| i * n + j;
    for i in lo..=hi {
        h[at(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (a, b) = (h[at(k, k)], h[at(k + 1, k)]);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (a / r, b / r)
        };
        rots.push((c, s));
        for j in k..=hi {
            let (x, y) = (h[at(k, j)], h[at(k + 1, j)]);
            h[at(k, j)] = c.conj() * x + s.conj() * y;
            h[at(k + 1, j)] = -s * x + c * y;
        }
    }
    for (k, &(c, s)) in (lo..hi).zip(&rots) {
        for i in lo..=(k + 1).min(hi) {
            let (x, y) = (h[at(i, k)], h[at(i, k + 1)]);
            h[at(i, k)] = x * c + y * s;
            h[at(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..=hi {
        h[at(i, i)] += mu;
    }
}

/// `‖(M - λI)v‖` for the approximate eigenvector `v` (unit norm) obtained by
/// inverse iteration. Dense LU, so meant for validation at moderate sizes.
pub fn eigenpair_residual(m: &ComplexMatrix, lambda: Complex64) -> f64 {
    let n = m.n();
    let scale = m.max_abs().max(1.0);
    // Nudge the shift off the exact eigenvalue so the factorisation is regular.
    let shifted = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    for i in 0..n {
        a[i * n + i] -= shifted;
    }
    let perm = lu_in_place(&mut a, n);
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0, (i as f64 * 0.37).sin())).collect();
    for _ in 0..3 {
        v = lu_solve(&a, &perm, n, &v);
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv == 0.0 || !nv.is_finite() {
            break;
        }
        for z in v.iter_mut() {
            *z /= nv;
        }
    }
    let mut res = 0.0;
    for i in 0..n {
        let mut s = -lambda * v[i];
        for j in 0..n {
            s += m[(i, j)] * v[j];
        }
        res += s.norm_sqr();
    }
    res.sqrt()
}

fn lu_in_place(a: &mut [Complex64], n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
            .expect("k < n");
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let piv = a[k * n + k];
        if piv.norm() == 0.0 {
            a[k * n + k] = Complex64::new(f64::EPSILON, 0.0);
        }
        let piv = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            a[i * n + k] = f;
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
        }
    }
    perm
}

fn lu_solve(lu: &[Complex64], perm: &[usize], n: usize, b: &[Complex64]) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            let t = lu[i * n + j] * y[j];
            y[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = lu[i * n + j] * y[j];
            y[i] -= t;
        }
        y[i] /= lu[i * n + i];
    }
    y
}
