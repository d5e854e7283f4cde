//! Smith normal form over ℤ and GF(2), exact Betti numbers and torsion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::Matrix;
use crate::simplicial::SimplicialComplex;
use crate::{Error, Result};

/// Largest matrix dimension accepted by [`smith_normal_form`].
pub const SNF_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    Gf2,
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" | "integers" => Ok(Ring::Integers),
            "gf2" | "f2" | "GF2" => Ok(Ring::Gf2),
            other => Err(Error::domain(format!("unknown ring '{other}'"))),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Integers => "z",
            Ring::Gf2 => "gf2",
        })
    }
}

/// `A = S · D · T` with `S`, `T` invertible over the ring and `D` carrying the
/// divisors `d_1 | d_2 | ... | d_k` on its leading diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition {
    pub ring: Ring,
    pub s: Matrix<BigInt>,
    pub d: Matrix<BigInt>,
    pub t: Matrix<BigInt>,
    pub rank: usize,
    pub divisors: Vec<BigInt>,
}

/// Operations the elimination needs from a Euclidean domain.
trait Euclid: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    /// Size used for pivot selection; smaller is preferred.
    fn size(&self) -> u64;
    /// Quotient `q` with `a - q b` of smaller size than `b` (or zero).
    fn quotient(a: &Self, b: &Self) -> Self;
    fn divides(b: &Self, a: &Self) -> bool;
    /// `a - q b`.
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Self;
    fn add(a: &Self, b: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_negative(&self) -> bool;
    fn to_bigint(&self) -> BigInt;
}

impl Euclid for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn size(&self) -> u64 {
        // Bit length is enough to steer towards small pivots; ties are broken by position.
        let bits = self.bits();
        if bits <= 63 {
            let mag: BigInt = self.abs();
            u64::try_from(&mag).unwrap_or(u64::MAX)
        } else {
            u64::MAX
        }
    }
    fn quotient(a: &Self, b: &Self) -> Self {
        // Floor division keeps |a - q b| < |b|.
        a.div_floor(b)
    }
    fn divides(b: &Self, a: &Self) -> bool {
        a.is_multiple_of(b)
    }
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Self {
        a - q * b
    }
    fn add(a: &Self, b: &Self) -> Self {
        a + b
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Gf2(bool);

impl Euclid for Gf2 {
    fn nil() -> Self {
        Gf2(false)
    }
    fn unit() -> Self {
        Gf2(true)
    }
    fn is_nil(&self) -> bool {
        !self.0
    }
    fn size(&self) -> u64 {
        1
    }
    fn quotient(a: &Self, _b: &Self) -> Self {
        *a
    }
    fn divides(_b: &Self, _a: &Self) -> bool {
        true
    }
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Self {
        Gf2(a.0 ^ (q.0 & b.0))
    }
    fn add(a: &Self, b: &Self) -> Self {
        Gf2(a.0 ^ b.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn is_negative(&self) -> bool {
        false
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(self.0 as u8)
    }
}

/// Working state: the invariant `A = S · W · T` holds after every operation.
struct Elimination<R> {
    w: Vec<Vec<R>>,
    s: Option<Vec<Vec<R>>>,
    t: Option<Vec<Vec<R>>>,
}

impl<R: Euclid> Elimination<R> {
    fn new(a: Vec<Vec<R>>, rows: usize, cols: usize, track: bool) -> Self {
        let eye = |n: usize| -> Vec<Vec<R>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { R::unit() } else { R::nil() }).collect())
                .collect()
        };
        Elimination {
            w: a,
            s: track.then(|| eye(rows)),
            t: track.then(|| eye(cols)),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.w.swap(i, j);
        if let Some(s) = self.s.as_mut() {
            for row in s.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.w.iter_mut() {
            row.swap(i, j);
        }
        if let Some(t) = self.t.as_mut() {
            t.swap(i, j);
        }
    }

    /// `row_i <- row_i - q row_p`.
    fn row_sub(&mut self, i: usize, p: usize, q: &R) {
        let (pivot_row, target) = two_rows(&mut self.w, p, i);
        for (x, y) in target.iter_mut().zip(pivot_row.iter()) {
            if !y.is_nil() {
                *x = R::sub_mul(x, q, y);
            }
        }
        if let Some(s) = self.s.as_mut() {
            // Column p of S gains q times column i.
            for row in s.iter_mut() {
                if !row[i].is_nil() {
                    row[p] = R::sub_mul(&row[p], &q.neg(), &row[i]);
                }
            }
        }
    }

    /// `col_j <- col_j - q col_p`.
    fn col_sub(&mut self, j: usize, p: usize, q: &R) {
        for row in self.w.iter_mut() {
            if !row[p].is_nil() {
                row[j] = R::sub_mul(&row[j], q, &row[p]);
            }
        }
        if let Some(t) = self.t.as_mut() {
            // Row p of T gains q times row j.
            let (pr, jr) = two_rows(t, j, p);
            for (x, y) in jr.iter_mut().zip(pr.iter()) {
                if !y.is_nil() {
                    *x = R::sub_mul(x, &q.neg(), y);
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.w[i].iter_mut() {
            *x = x.neg();
        }
        if let Some(s) = self.s.as_mut() {
            for row in s.iter_mut() {
                row[i] = row[i].neg();
            }
        }
    }

    /// `row_p <- row_p + row_i`.
    fn row_add(&mut self, p: usize, i: usize) {
        let (src, dst) = two_rows(&mut self.w, i, p);
        for (x, y) in dst.iter_mut().zip(src.iter()) {
            *x = R::add(x, y);
        }
        if let Some(s) = self.s.as_mut() {
            // Column i of S loses column p.
            for row in s.iter_mut() {
                row[i] = R::sub_mul(&row[i], &R::unit(), &row[p]);
            }
        }
    }

    fn run(&mut self) -> Vec<R> {
        let rows = self.w.len();
        let cols = self.w.first().map_or(0, Vec::len);
        let mut divisors = Vec::new();
        for p in 0..rows.min(cols) {
            let Some((pi, pj)) = self.min_entry(p) else {
                break;
            };
            self.swap_rows(p, pi);
            self.swap_cols(p, pj);
            loop {
                let pivot = self.w[p][p].clone();
                let mut residue = false;
                for i in p + 1..rows {
                    if !self.w[i][p].is_nil() {
                        let q = R::quotient(&self.w[i][p], &pivot);
                        self.row_sub(i, p, &q);
                        residue |= !self.w[i][p].is_nil();
                    }
                }
                for j in p + 1..cols {
                    if !self.w[p][j].is_nil() {
                        let q = R::quotient(&self.w[p][j], &pivot);
                        self.col_sub(j, p, &q);
                        residue |= !self.w[p][j].is_nil();
                    }
                }
                if residue {
                    // A remainder is strictly smaller than the pivot: promote it.
                    let (bi, bj) = self.min_in_cross(p);
                    self.swap_rows(p, bi);
                    self.swap_cols(p, bj);
                    continue;
                }
                let offender = (p + 1..rows).find(|&i| {
                    self.w[i][p + 1..]
                        .iter()
                        .any(|x| !x.is_nil() && !R::divides(&pivot, x))
                });
                match offender {
                    Some(i) => self.row_add(p, i),
                    None => break,
                }
            }
            if self.w[p][p].is_negative() {
                self.negate_row(p);
            }
            divisors.push(self.w[p][p].clone());
        }
        divisors
    }

    fn min_entry(&self, p: usize) -> Option<(usize, usize)> {
        let mut best: Option<(u64, usize, usize)> = None;
        for (i, row) in self.w.iter().enumerate().skip(p) {
            for (j, x) in row.iter().enumerate().skip(p) {
                if !x.is_nil() {
                    let size = x.size();
                    if best.is_none_or(|(b, _, _)| size < b) {
                        best = Some((size, i, j));
                        if size == 1 {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn min_in_cross(&self, p: usize) -> (usize, usize) {
        let mut best = (u64::MAX, p, p);
        for i in p..self.w.len() {
            let x = &self.w[i][p];
            if !x.is_nil() && x.size() < best.0 {
                best = (x.size(), i, p);
            }
        }
        for (j, x) in self.w[p].iter().enumerate().skip(p) {
            if !x.is_nil() && x.size() < best.0 {
                best = (x.size(), p, j);
            }
        }
        (best.1, best.2)
    }
}

fn two_rows<T>(m: &mut [Vec<T>], a: usize, b: usize) -> (&Vec<T>, &mut Vec<T>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

fn to_matrix<R: Euclid>(rows: &[Vec<R>], nrows: usize, ncols: usize) -> Matrix<BigInt> {
    Matrix::from_fn(nrows, ncols, |i, j| rows[i][j].to_bigint())
}

fn check_size(a: &Matrix<i64>) -> Result<()> {
    let big = a.rows().max(a.cols());
    if big > SNF_CAP {
        return Err(Error::size("SNF matrix dimension", SNF_CAP, big));
    }
    Ok(())
}

fn run_elimination<R: Euclid>(
    a: &Matrix<i64>,
    lift: impl Fn(i64) -> R,
    track: bool,
) -> (Vec<R>, Elimination<R>) {
    let rows: Vec<Vec<R>> = (0..a.rows())
        .map(|i| a.row(i).iter().map(|&v| lift(v)).collect())
        .collect();
    let mut e = Elimination::new(rows, a.rows(), a.cols(), track);
    let divisors = e.run();
    (divisors, e)
}

/// Full Smith normal form including the transforms.
pub fn smith_normal_form(a: &Matrix<i64>, ring: Ring) -> Result<SmithDecomposition> {
    check_size(a)?;
    let (r, c) = (a.rows(), a.cols());
    let (divisors, s, w, t) = match ring {
        Ring::Integers => {
            let (d, e) = run_elimination(a, BigInt::from, true);
            log_growth(&e.w, &e.s, &e.t);
            let s = to_matrix(e.s.as_ref().expect("tracked"), r, r);
            let t = to_matrix(e.t.as_ref().expect("tracked"), c, c);
            (d.iter().map(Euclid::to_bigint).collect::<Vec<_>>(), s, to_matrix(&e.w, r, c), t)
        }
        Ring::Gf2 => {
            let (d, e) = run_elimination(a, |v| Gf2(v.rem_euclid(2) == 1), true);
            let s = to_matrix(e.s.as_ref().expect("tracked"), r, r);
            let t = to_matrix(e.t.as_ref().expect("tracked"), c, c);
            (d.iter().map(Euclid::to_bigint).collect::<Vec<_>>(), s, to_matrix(&e.w, r, c), t)
        }
    };
    Ok(SmithDecomposition {
        ring,
        s,
        d: w,
        t,
        rank: divisors.len(),
        divisors,
    })
}

/// Divisors only, without accumulating transforms.
pub fn smith_divisors(a: &Matrix<i64>, ring: Ring) -> Result<Vec<BigInt>> {
    check_size(a)?;
    Ok(match ring {
        Ring::Integers => run_elimination(a, BigInt::from, false).0,
        Ring::Gf2 => run_elimination(a, |v| Gf2(v.rem_euclid(2) == 1), false)
            .0
            .iter()
            .map(Euclid::to_bigint)
            .collect(),
    })
}

fn log_growth(w: &[Vec<BigInt>], s: &Option<Vec<Vec<BigInt>>>, t: &Option<Vec<Vec<BigInt>>>) {
    if !log::log_enabled!(log::Level::Debug) {
        return;
    }
    let bits = |m: &[Vec<BigInt>]| m.iter().flatten().map(BigInt::bits).max().unwrap_or(0);
    log::debug!(
        "SNF entry growth: D {} bits, S {} bits, T {} bits",
        bits(w),
        s.as_deref().map_or(0, bits),
        t.as_deref().map_or(0, bits)
    );
}

/// Ranks of `∂_1..∂_d` over GF(2) by sparse column reduction.
///
/// Reduction runs from the top dimension down. An r-face that is the pivot of a
/// reduced column of `∂_{r+1}` has a column in `∂_r` that reduces to zero, so
/// it is skipped outright.
pub fn gf2_boundary_ranks(x: &SimplicialComplex) -> Vec<usize> {
    let d = x.dim();
    let mut ranks = vec![0usize; d + 1];
    let mut cleared: Vec<bool> = Vec::new();
    for r in (1..=d).rev() {
        let columns = x.boundary_columns(r).expect("1 <= r <= d");
        let n_rows = x.faces(r - 1).len();
        let mut owner: Vec<u32> = vec![u32::MAX; n_rows];
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
        let mut next_cleared = vec![false; n_rows];
        let mut rank = 0;
        let mut scratch = Vec::new();
        for (j, col) in columns.into_iter().enumerate() {
            if cleared.get(j).copied().unwrap_or(false) {
                reduced.push(Vec::new());
                continue;
            }
            let mut col: Vec<u32> = col.into_iter().map(|(row, _)| row).collect();
            while let Some(&low) = col.last() {
                let o = owner[low as usize];
                if o == u32::MAX {
                    break;
                }
                symmetric_difference_into(&col, &reduced[o as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                owner[low as usize] = j as u32;
                next_cleared[low as usize] = true;
                rank += 1;
            }
            reduced.push(col);
        }
        ranks[r] = rank;
        cleared = next_cleared;
    }
    ranks
}

pub(crate) fn symmetric_difference_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn boundary_ranks_over(x: &SimplicialComplex, ring: Ring) -> Result<Vec<usize>> {
    match ring {
        Ring::Gf2 => Ok(gf2_boundary_ranks(x)),
        Ring::Integers => {
            let mut ranks = vec![0usize; x.dim() + 1];
            for r in 1..=x.dim() {
                let d = crate::simplicial::boundary_operator(x, r)?;
                ranks[r] = smith_divisors(&d, Ring::Integers)?.len();
            }
            Ok(ranks)
        }
    }
}

/// `β_i = n_i - rank ∂_i - rank ∂_{i+1}` over the chosen coefficients.
pub fn betti_snf(x: &SimplicialComplex, ring: Ring) -> Result<Vec<usize>> {
    let ranks = boundary_ranks_over(x, ring)?;
    let n = x.counts();
    Ok((0..=x.dim())
        .map(|i| {
            let below = ranks[i];
            let above = ranks.get(i + 1).copied().unwrap_or(0);
            n[i] - below - above
        })
        .collect())
}

/// Torsion coefficients of `H_i(X; ℤ)`: the divisors of `SNF(∂_{i+1})` above 1.
pub fn torsion_coefficients(x: &SimplicialComplex, i: usize) -> Result<Vec<BigInt>> {
    if x.dim() == 0 || i >= x.dim() {
        return Err(Error::domain(format!(
            "torsion of H_{i} needs 0 <= i <= d - 1 = {}",
            x.dim() as i64 - 1
        )));
    }
    let d = crate::simplicial::boundary_operator(x, i + 1)?;
    Ok(smith_divisors(&d, Ring::Integers)?
        .into_iter()
        .filter(|v| *v > <BigInt as One>::one())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::boundary_operator;

    fn tetrahedron() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap()
    }

    /// Six-vertex triangulation of the real projective plane.
    pub(crate) fn rp2() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[
            [1, 2, 3],
            [1, 3, 4],
            [1, 4, 5],
            [1, 5, 6],
            [1, 2, 6],
            [2, 3, 5],
            [2, 4, 5],
            [2, 4, 6],
            [3, 4, 6],
            [3, 5, 6],
        ])
        .unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn check_decomposition(a: &Matrix<i64>, dec: &SmithDecomposition) {
        let lifted = a.map(|&v| match dec.ring {
            Ring::Integers => big(v),
            Ring::Gf2 => big(v.rem_euclid(2)),
        });
        let mut product = dec.s.matmul(&dec.d).matmul(&dec.t);
        if dec.ring == Ring::Gf2 {
            product = product.map(|v| v.mod_floor(&big(2)));
        }
        assert_eq!(product, lifted);
        for i in 0..dec.d.rows() {
            for j in 0..dec.d.cols() {
                if i != j || i >= dec.rank {
                    assert!(dec.d[(i, j)].is_zero());
                }
            }
        }
        for w in dec.divisors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(dec.divisors.iter().all(|d| *d > BigInt::zero()));
    }

    #[test]
    fn zero_matrix() {
        let z = Matrix::<i64>::zeros(3, 2);
        let dec = smith_normal_form(&z, Ring::Integers).unwrap();
        assert_eq!(dec.rank, 0);
        assert!(dec.d.is_zero());
    }

    #[test]
    fn tetrahedron_edge_boundary() {
        let d1 = boundary_operator(&tetrahedron(), 1).unwrap();
        let dec = smith_normal_form(&d1, Ring::Integers).unwrap();
        assert_eq!(dec.rank, 3);
        assert_eq!(dec.divisors, vec![big(1), big(1), big(1)]);
        check_decomposition(&d1, &dec);
    }

    #[test]
    fn diagonal_already_in_normal_form() {
        let a = Matrix::from_vec(2, 2, vec![2, 0, 0, 4]);
        let dec = smith_normal_form(&a, Ring::Integers).unwrap();
        assert_eq!(dec.divisors, vec![big(2), big(4)]);
        check_decomposition(&a, &dec);
        // diag(4, 6) is not: its invariant factors are (2, 12).
        let b = Matrix::from_vec(2, 2, vec![4, 0, 0, 6]);
        let dec = smith_normal_form(&b, Ring::Integers).unwrap();
        assert_eq!(dec.divisors, vec![big(2), big(12)]);
        check_decomposition(&b, &dec);
    }

    #[test]
    fn gf2_divisors_are_ones() {
        let a = Matrix::from_vec(3, 3, vec![2, 1, 0, 1, 1, 1, 3, 0, 1]);
        let dec = smith_normal_form(&a, Ring::Gf2).unwrap();
        assert!(dec.divisors.iter().all(|d| d.is_one()));
        check_decomposition(&a, &dec);
    }

    #[test]
    fn betti_examples() {
        assert_eq!(betti_snf(&tetrahedron(), Ring::Integers).unwrap(), vec![1, 0, 1]);
        assert_eq!(betti_snf(&tetrahedron(), Ring::Gf2).unwrap(), vec![1, 0, 1]);
        let point = SimplicialComplex::from_facets(&[[1]]).unwrap();
        assert_eq!(betti_snf(&point, Ring::Gf2).unwrap(), vec![1]);
        assert_eq!(betti_snf(&rp2(), Ring::Integers).unwrap(), vec![1, 0, 0]);
        assert_eq!(betti_snf(&rp2(), Ring::Gf2).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn torsion_examples() {
        assert!(torsion_coefficients(&tetrahedron(), 1).unwrap().is_empty());
        assert_eq!(torsion_coefficients(&rp2(), 1).unwrap(), vec![big(2)]);
        let graph = SimplicialComplex::from_facets(&[[1, 2], [2, 3], [3, 1], [3, 4]]).unwrap();
        assert!(torsion_coefficients(&graph, 0).unwrap().is_empty());
        assert!(torsion_coefficients(&graph, 1).is_err());
        let point = SimplicialComplex::from_facets(&[[1]]).unwrap();
        assert!(torsion_coefficients(&point, 0).is_err());
    }

    #[test]
    fn transforms_are_unimodular() {
        let d2 = boundary_operator(&rp2(), 2).unwrap();
        let dec = smith_normal_form(&d2, Ring::Integers).unwrap();
        check_decomposition(&d2, &dec);
        assert_eq!(dec.divisors.last(), Some(&big(2)));
        // β_2 = 0 over ℤ, so all ten triangles are independent.
        assert_eq!(dec.rank, 10);
        assert_eq!(integer_det(&dec.s).abs(), big(1));
        assert_eq!(integer_det(&dec.t).abs(), big(1));
    }

    /// Bareiss fraction-free determinant.
    fn integer_det(m: &Matrix<BigInt>) -> BigInt {
        let n = m.rows();
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut sign = big(1);
        let mut prev = big(1);
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return big(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    #[test]
    fn size_cap() {
        let a = Matrix::<i64>::zeros(1, SNF_CAP + 1);
        assert!(matches!(
            smith_normal_form(&a, Ring::Integers),
            Err(Error::SizeLimit { .. })
        ));
    }
}
