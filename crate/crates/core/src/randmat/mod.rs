//! Random matrices (Ginibre, Wigner, Haar unitary), repulsive point clouds and
//! a random-conjugation realisation of free additive convolution.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. A uniform is
//! the top 53 bits of `next_u64` scaled by `2^-53`; Gaussians use Box-Muller
//! on consecutive uniform pairs `(u1, u2)` with `r = sqrt(-2 ln(1 - u1))`,
//! `θ = 2π u2`, emitting `r cos θ` then `r sin θ`. A standard complex Gaussian
//! is `(g1 + i g2) / √2`.

mod eig;

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::One;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use eig::{eig_general, eig_hermitian, eigenpair_residual, eigvals_hermitian, HermitianEigen, EIG_GENERAL_CAP};

use crate::spectra::{SpectralMeasure, DEFAULT_MERGE_TOL};
use crate::tda::PointCloud;
use crate::{Error, Rational, Result};

pub const SAMPLER_CAP: usize = 2000;
pub const HAAR_CAP: usize = 1200;
pub const CLOUD_CAP: usize = 1200;
pub const FREE_CONVOLUTION_CAP: usize = 800;
const HAAR_ATTEMPTS: u64 = 3;

/// Deterministic uniform and Gaussian stream.
#[derive(Clone, Debug)]
pub struct GaussianRng {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianRng {
    pub fn new(seed: u64) -> Self {
        GaussianRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(g) = self.spare.take() {
            return g;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    General,
    Ginibre,
    Hermitian,
    Unitary,
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
    structure: Structure,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
            structure: Structure::General,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix {
            n,
            data,
            structure: Structure::General,
        }
    }

    pub(crate) fn with_structure(mut self, s: Structure) -> Self {
        self.structure = s;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let s = match self.structure {
            Structure::Ginibre => Structure::General,
            other => other,
        };
        ComplexMatrix::from_fn(n, |i, j| self.data[j * n + i].conj()).with_structure(s)
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            structure: Structure::General,
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            structure: Structure::General,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
            structure: Structure::General,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// `‖M*M - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().matmul(self).sub(&ComplexMatrix::identity(self.n)).frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

fn check_order(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!("{what} must be at least 1")));
    }
    if n > cap {
        return Err(Error::size(what, cap, n));
    }
    Ok(())
}

/// I.i.d. standard complex Gaussian entries scaled by `1/√N`, filled row by row.
pub fn ginibre(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_order(n, SAMPLER_CAP, "Ginibre order")?;
    Ok(ginibre_uncapped(n, seed))
}

fn ginibre_uncapped(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = GaussianRng::new(seed);
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, |_, _| rng.complex_normal() * s).with_structure(Structure::Ginibre)
}

/// `(C + C*) / √2` for `C = ginibre(n, seed)`.
pub fn wigner(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let c = ginibre(n, seed)?;
    let n = c.n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(ComplexMatrix::from_fn(n, |i, j| (c.data[i * n + j] + c.data[j * n + i].conj()) * s)
        .with_structure(Structure::Hermitian))
}

/// Polar part `C (C*C)^{-1/2}` of a Ginibre matrix. If `C*C` is numerically
/// singular the matrix is redrawn from `seed + 1`, then `seed + 2`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    check_order(n, HAAR_CAP, "Haar unitary order")?;
    let mut last_min = f64::NAN;
    for attempt in 0..HAAR_ATTEMPTS {
        let c = ginibre_uncapped(n, seed.wrapping_add(attempt));
        let gram = c.adjoint().matmul(&c).with_structure(Structure::Hermitian);
        let e = eig_hermitian(&gram)?;
        last_min = e.values[0];
        if last_min < 1e-12 {
            log::debug!("Haar draw {attempt} rejected: min eigenvalue of C*C = {last_min:e}");
            continue;
        }
        // (C*C)^{-1/2} = V diag(λ^{-1/2}) V*.
        let v = &e.vectors;
        let scaled = ComplexMatrix::from_fn(n, |i, j| v[(i, j)] / e.values[j].sqrt());
        let u = c.matmul(&scaled).matmul(&v.adjoint()).with_structure(Structure::Unitary);
        let defect = u.unitarity_defect();
        if defect > 1e-8 * (n as f64).sqrt() {
            return Err(Error::Numerical(format!(
                "polar factor is not unitary: ‖U*U - I‖_F = {defect:e}"
            )));
        }
        return Ok(u);
    }
    Err(Error::Numerical(format!(
        "C*C stayed singular over {HAAR_ATTEMPTS} draws (last min eigenvalue {last_min:e})"
    )))
}

/// Eigenvalues of `ginibre(n, seed)` as planar points.
pub fn repulsive_disk_cloud(n: usize, seed: u64) -> Result<PointCloud> {
    check_order(n, CLOUD_CAP, "cloud size")?;
    let ev = eig_general(&ginibre_uncapped(n, seed))?;
    Ok(PointCloud::new(ev.iter().map(|z| vec![z.re, z.im]).collect())?.with_metadata("disk", Some(seed)))
}

/// Eigenvalues of `haar_unitary(n, seed)`: repulsive points on the unit circle.
pub fn repulsive_circle_cloud(n: usize, seed: u64) -> Result<PointCloud> {
    check_order(n, CLOUD_CAP, "cloud size")?;
    let ev = eig_general(&haar_unitary(n, seed)?)?;
    Ok(PointCloud::new(ev.iter().map(|z| vec![z.re, z.im]).collect())?.with_metadata("circle", Some(seed)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusMode {
    Independent,
    Repulsive,
}

/// Area-uniform points on the torus of radii `R > r > 0`,
/// `(θ, φ) ↦ ((R + r cos φ) cos θ, (R + r cos φ) sin θ, r sin φ)`.
///
/// `φ` is accepted with probability `(R + r cos φ) / (R + r)`. Independent mode
/// draws `(θ, φ)` from i.i.d. uniforms. Repulsive mode takes them from Ginibre
/// eigenvalues `z` inside the unit disk as `θ = arg z`, `φ = 2π|z|²` (both
/// uniform under the circular law), shuffled, with acceptance uniforms from the
/// same seeded stream; the batch grows if acceptance runs dry.
pub fn torus_cloud(n: usize, big_r: f64, r: f64, mode: TorusMode, seed: u64) -> Result<PointCloud> {
    check_order(n, CLOUD_CAP, "cloud size")?;
    if !(big_r > r && r > 0.0 && big_r.is_finite()) {
        return Err(Error::domain(format!("torus needs R > r > 0, got R = {big_r}, r = {r}")));
    }
    let accept_ratio = |phi: f64| (big_r + r * phi.cos()) / (big_r + r);
    let embed = |theta: f64, phi: f64| {
        let w = big_r + r * phi.cos();
        vec![w * theta.cos(), w * theta.sin(), r * phi.sin()]
    };
    let mut rng = GaussianRng::new(seed);
    let mut points = Vec::with_capacity(n);
    match mode {
        TorusMode::Independent => {
            while points.len() < n {
                let theta = 2.0 * PI * rng.uniform();
                let phi = 2.0 * PI * rng.uniform();
                if rng.uniform() <= accept_ratio(phi) {
                    points.push(embed(theta, phi));
                }
            }
        }
        TorusMode::Repulsive => {
            // Expected yield per eigenvalue is about R / (R + r) times the disk fraction.
            let mut batch = ((n as f64) * (big_r + r) / big_r * 1.15).ceil() as usize + 16;
            let mut round = 0u64;
            loop {
                let ev = eig::eig_general_uncapped(&ginibre_uncapped(batch, seed.wrapping_add(round)))?;
                let mut cands: Vec<(f64, f64)> = ev
                    .iter()
                    .filter(|z| z.norm_sqr() < 1.0)
                    .map(|z| (z.im.atan2(z.re).rem_euclid(2.0 * PI), 2.0 * PI * z.norm_sqr()))
                    .collect();
                rng.shuffle(&mut cands);
                points.clear();
                for (theta, phi) in cands {
                    if rng.uniform() <= accept_ratio(phi) {
                        points.push(embed(theta, phi));
                        if points.len() == n {
                            break;
                        }
                    }
                }
                if points.len() == n {
                    break;
                }
                log::debug!("torus acceptance starved with batch {batch}; enlarging");
                batch = batch * 3 / 2;
                round += 1;
            }
        }
    }
    let tag = match mode {
        TorusMode::Independent => "torus-ind",
        TorusMode::Repulsive => "torus-rep",
    };
    Ok(PointCloud::new(points)?.with_metadata(tag, Some(seed)))
}

/// Diagonal entries realising `mu` with multiplicities `⌊w N⌋`; the remainder
/// goes to the heaviest atom (the first of equal weights).
fn diagonal_of(atoms: &[(Rational, Rational)], n: usize) -> Vec<f64> {
    let nr = Rational::from_integer(n.into());
    let mut counts: Vec<usize> = atoms
        .iter()
        .map(|(_, w)| {
            let c = (w * &nr).floor().to_integer();
            usize::try_from(&c).expect("weight <= 1")
        })
        .collect();
    let heaviest = (0..atoms.len())
        .max_by(|&i, &j| atoms[i].1.cmp(&atoms[j].1).then(j.cmp(&i)))
        .expect("nonempty measure");
    counts[heaviest] += n - counts.iter().sum::<usize>();
    let mut d = Vec::with_capacity(n);
    for ((v, _), c) in atoms.iter().zip(counts) {
        d.extend(std::iter::repeat_n(rational_to_f64(v), c));
    }
    d
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Empirical spectral measure of `D1 + U D2 U*` with `U = haar_unitary(n, seed)`.
/// When either input is a point mass the result is the exact translate of the other.
pub fn free_convolution_sample(
    mu1: &SpectralMeasure,
    mu2: &SpectralMeasure,
    n: usize,
    seed: u64,
) -> Result<SpectralMeasure> {
    check_order(n, FREE_CONVOLUTION_CAP, "free convolution order")?;
    let exact = |mu: &SpectralMeasure| -> Result<Vec<(Rational, Rational)>> {
        mu.exact_atoms()
            .map(<[_]>::to_vec)
            .ok_or_else(|| Error::Precondition("free convolution needs measures with rational atoms".into()))
    };
    let (a1, a2) = (exact(mu1)?, exact(mu2)?);
    let translate = |atoms: &[(Rational, Rational)], c: &Rational| {
        SpectralMeasure::from_rational_atoms(atoms.iter().map(|(v, w)| (v + c, w.clone())).collect())
    };
    if a2.len() == 1 && a2[0].1.is_one() {
        return translate(&a1, &a2[0].0);
    }
    if a1.len() == 1 && a1[0].1.is_one() {
        return translate(&a2, &a1[0].0);
    }
    let d1 = ComplexMatrix::diagonal(&diagonal_of(&a1, n));
    let d2 = ComplexMatrix::diagonal(&diagonal_of(&a2, n));
    let u = haar_unitary(n, seed)?;
    let conj = u.matmul(&d2).matmul(&u.adjoint());
    let m = ComplexMatrix::from_fn(n, |i, j| {
        // Symmetrise away the rounding in U D U*.
        d1[(i, j)] + 0.5 * (conj[(i, j)] + conj[(j, i)].conj())
    })
    .with_structure(Structure::Hermitian);
    let values = eigvals_hermitian(&m)?;
    SpectralMeasure::from_real_points(&values, DEFAULT_MERGE_TOL)
}

/// CDF of the semicircle law on `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    0.5 + (x * (4.0 - x * x).sqrt() / 2.0 + 2.0 * (x / 2.0).asin()) / (2.0 * PI)
}

/// I.i.d. semicircle samples by bisection on the CDF to within `1e-10`.
pub fn semicircle_samples(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = GaussianRng::new(seed);
    (0..n)
        .map(|_| {
            let u = rng.uniform();
            let (mut lo, mut hi) = (-2.0f64, 2.0f64);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if semicircle_cdf(mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
