//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Largest accepted matrix order.
pub const EIGH_CAP: usize = 4096;
/// Default stopping threshold on `‖offdiag(A)‖_F / ‖A‖_F`.
pub const DEFAULT_EIGH_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix<f64>,
}

/// Eigenvalues and orthonormal eigenvectors of a real symmetric matrix.
pub fn eigh(m: &Matrix<f64>, tol: f64) -> Result<SymmetricEigen> {
    let (values, vt) = jacobi(m, tol, true)?;
    let vt = vt.expect("eigenvectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vectors = Matrix::from_fn(n, n, |i, j| vt[(order[j], i)]);
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

/// Ascending eigenvalues only; skips the eigenvector accumulation.
pub fn eigvalsh(m: &Matrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi(m, tol, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn check_symmetric(m: &Matrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::domain(format!(
            "eigh needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > EIGH_CAP {
        return Err(Error::size("eigh matrix order", EIGH_CAP, m.rows()));
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let norm = m.frobenius_norm();
    let n = m.rows();
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * norm {
                return Err(Error::domain(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    Ok(norm)
}

/// Returns the unsorted diagonal and, on request, the transposed eigenvector
/// matrix (row `k` is the k-th eigenvector).
///
/// Pairs are visited in round-robin order: each round is a set of `n/2`
/// disjoint rotations, applied to the rows in one pass and to the columns in a
/// second, row-by-row pass. This is a cyclic ordering, so the usual quadratic
/// convergence holds, and both passes walk memory contiguously.
fn jacobi(m: &Matrix<f64>, tol: f64, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix<f64>>)> {
    let norm = check_symmetric(m)?;
    let n = m.rows();
    // Symmetrize so that the two passes keep the matrix exactly symmetric.
    let mut a = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut vt = want_vectors.then(|| Matrix::<f64>::identity(n));
    if n <= 1 || norm == 0.0 {
        return Ok(((0..n).map(|i| a[(i, i)]).collect(), vt));
    }
    let target = tol * norm;
    let schedule = round_robin(n);
    let mut rots: Vec<Rotation> = Vec::with_capacity(n / 2);

    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target {
            log::debug!("jacobi converged after {sweep} sweeps (n = {n}, off = {off:e})");
            return Ok(((0..n).map(|i| a[(i, i)]).collect(), vt));
        }
        // Early sweeps skip entries well below the average off-diagonal size.
        let skip_below = if sweep < 3 { 0.2 * off / (n as f64 * n as f64) } else { 0.0 };
        for round in &schedule {
            rots.clear();
            for &(p, q) in round {
                let apq = a[(p, q)];
                if apq == 0.0 || apq.abs() < skip_below {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // Entries already below rounding level of both diagonals are dropped.
                if sweep > 3 && apq.abs() * 1e17 < app.abs().min(aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                rots.push(Rotation {
                    p,
                    q,
                    c,
                    s: t * c,
                    pp: app - t * apq,
                    qq: aqq + t * apq,
                });
            }
            if rots.is_empty() {
                continue;
            }
            let data = a.as_mut_slice();
            for r in &rots {
                rotate_rows(data, n, r.p, r.q, r.c, r.s);
            }
            for row in data.chunks_exact_mut(n) {
                for r in &rots {
                    let (x, y) = (row[r.p], row[r.q]);
                    row[r.p] = r.c * x - r.s * y;
                    row[r.q] = r.s * x + r.c * y;
                }
            }
            for r in &rots {
                data[r.p * n + r.p] = r.pp;
                data[r.q * n + r.q] = r.qq;
                data[r.p * n + r.q] = 0.0;
                data[r.q * n + r.p] = 0.0;
            }
            if let Some(v) = vt.as_mut() {
                let vd = v.as_mut_slice();
                for r in &rots {
                    rotate_rows(vd, n, r.p, r.q, r.c, r.s);
                }
            }
        }
    }
    Err(Error::Numerical(format!(
        "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (n = {n}, off = {:e}, target = {target:e})",
        off_diagonal_norm(&a)
    )))
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    pp: f64,
    qq: f64,
}

/// Circle-method tournament: `n - 1` rounds (n even) of disjoint pairs `p < q`
/// covering every pair once.
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n + n % 2;
    let mut players: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let round: Vec<(usize, usize)> = (0..m / 2)
            .map(|i| (players[i], players[m - 1 - i]))
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        rounds.push(round);
        players[1..].rotate_right(1);
    }
    rounds
}

fn off_diagonal_norm(a: &Matrix<f64>) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        let row = a.row(i);
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

#[inline]
fn rotate_rows(data: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at_mut(q * n);
    let rp = &mut head[p * n..(p + 1) * n];
    let rq = &mut tail[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
