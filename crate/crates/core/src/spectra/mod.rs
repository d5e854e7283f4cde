//! Combinatorial Laplacian spectra, spectral Betti numbers, rooted spectral
//! measures and the tensor realization of classical independence.

mod eigh;
mod measure;

use std::fmt::Write as _;

use num_complex::Complex64;

pub use eigh::{eigh, eigvalsh, SymmetricEigen, DEFAULT_EIGH_TOL, EIGH_CAP};
pub use measure::{Atom, SpectralMeasure, DEFAULT_MERGE_TOL};

use crate::matrix::Matrix;
use crate::simplicial::{boundary_operator, GradedMatrix, SimplicialComplex};
use crate::{Error, Result};

/// Relative zero-eigenvalue threshold: eigenvalues below
/// `ZERO_TOL * max(λ_max, 1)` count as zero.
pub const ZERO_TOL: f64 = 1e-8;

/// The block-diagonal Laplacian `JJ* + J*J`; block `i` is
/// `∂_i*∂_i + ∂_{i+1}∂_{i+1}*` with the terms that do not exist omitted.
pub fn laplacian(x: &SimplicialComplex) -> GradedMatrix<i64> {
    let mut l = GradedMatrix::zeros(x.counts());
    for i in 0..=x.dim() {
        l.set_block(i, i, &laplacian_block(x, i));
    }
    l
}

/// Grade-`i` block of the Laplacian.
pub fn laplacian_block(x: &SimplicialComplex, i: usize) -> Matrix<i64> {
    let n = x.counts()[i];
    let mut block = Matrix::zeros(n, n);
    let mut add = |m: Matrix<i64>| {
        for (b, v) in block.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *b += v;
        }
    };
    if i >= 1 {
        let d = boundary_operator(x, i).expect("1 <= i <= d");
        add(d.transpose().matmul(&d));
    }
    if i < x.dim() {
        let d = boundary_operator(x, i + 1).expect("i + 1 <= d");
        add(d.matmul(&d.transpose()));
    }
    block
}

#[derive(Clone, Debug)]
pub struct GradeSpectrum {
    /// Ascending eigenvalues with multiplicity; those below threshold are exactly 0.
    pub eigenvalues: Vec<f64>,
    /// Uniform measure `1/n_i` on the eigenvalues.
    pub measure: SpectralMeasure,
    /// Threshold used to clamp eigenvalues to zero.
    pub zero_threshold: f64,
    /// Number of clamped eigenvalues.
    pub zeros: usize,
}

#[derive(Clone, Debug)]
pub struct LaplacianSpectrum {
    pub grading: Vec<usize>,
    pub grades: Vec<GradeSpectrum>,
}

/// Per grade, the uniform measure on the eigenvalues of the Laplacian block.
///
/// `tol` is relative: eigenvalues below `tol * max(λ_max, 1)` are set to 0.
pub fn laplacian_spectrum(x: &SimplicialComplex, tol: f64) -> Result<LaplacianSpectrum> {
    let mut grades = Vec::with_capacity(x.dim() + 1);
    for i in 0..=x.dim() {
        let block = laplacian_block(x, i).map(|&v| v as f64);
        let mut eigenvalues = eigvalsh(&block, DEFAULT_EIGH_TOL)?;
        let scale = eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
        let zero_threshold = tol * scale;
        if let Some(&lowest) = eigenvalues.first() {
            if lowest < -1e-9 * scale {
                return Err(Error::Numerical(format!(
                    "Laplacian block {i} has negative eigenvalue {lowest}"
                )));
            }
        }
        let mut zeros = 0;
        for ev in eigenvalues.iter_mut() {
            if *ev < zero_threshold {
                *ev = 0.0;
                zeros += 1;
            }
        }
        let measure = SpectralMeasure::from_real_points(&eigenvalues, DEFAULT_MERGE_TOL)?;
        grades.push(GradeSpectrum {
            eigenvalues,
            measure,
            zero_threshold,
            zeros,
        });
    }
    Ok(LaplacianSpectrum {
        grading: x.counts(),
        grades,
    })
}

impl LaplacianSpectrum {
    /// Export format: a `grade eigenvalue multiplicity` header, then one line per atom.
    pub fn to_text(&self) -> String {
        let mut out = String::from("grade eigenvalue multiplicity\n");
        for (i, g) in self.grades.iter().enumerate() {
            let n = self.grading[i] as f64;
            for atom in g.measure.atoms() {
                let mult = (atom.weight * n).round() as usize;
                writeln!(out, "{i} {} {mult}", atom.value.re).expect("writing to a String");
            }
        }
        out
    }
}

/// `β_i = n_i · μ_i({0})`.
///
/// A tolerance error is raised when the rounded count is off by 0.01 or more,
/// or when an eigenvalue above the zero threshold merges into the zero atom.
pub fn betti_spectral(x: &SimplicialComplex, tol: f64) -> Result<Vec<usize>> {
    let spectrum = laplacian_spectrum(x, tol)?;
    spectrum
        .grades
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let n = spectrum.grading[i] as f64;
            let weight = g.measure.weight_near(Complex64::new(0.0, 0.0), g.measure.tolerance());
            let raw = weight * n;
            let beta = raw.round();
            if (raw - beta).abs() >= 0.01 {
                return Err(Error::Tolerance(format!(
                    "grade {i}: zero-atom weight {weight} times n_i = {n} is not an integer"
                )));
            }
            if beta as usize != g.zeros {
                return Err(Error::Tolerance(format!(
                    "grade {i}: an eigenvalue lies just above the zero threshold {}",
                    g.zero_threshold
                )));
            }
            Ok(beta as usize)
        })
        .collect()
}

/// Spectral measure of `M` in the state `⟨e_j, · e_j⟩` (1-based `j`): atoms at
/// the eigenvalues with weights `α_i²`, where `α` are the coordinates of `e_j`
/// in the eigenbasis.
pub fn rooted_spectral_measure(m: &Matrix<f64>, j: usize) -> Result<SpectralMeasure> {
    if j == 0 || j > m.rows() {
        return Err(Error::domain(format!("root {j} outside 1..={}", m.rows())));
    }
    let e = eigh(m, DEFAULT_EIGH_TOL)?;
    let weights: Vec<f64> = (0..m.rows()).map(|i| e.vectors[(j - 1, i)].powi(2)).collect();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let raw = SpectralMeasure::from_weighted_real(&e.values, &weights, DEFAULT_MERGE_TOL)?;
    // Drop atoms that carry no mass.
    let kept: Vec<&Atom> = raw.atoms().iter().filter(|a| a.weight > 1e-14).collect();
    let values: Vec<f64> = kept.iter().map(|a| a.value.re).collect();
    let kept_weights: Vec<f64> = kept.iter().map(|a| a.weight).collect();
    let mass: f64 = kept_weights.iter().sum();
    let kept_weights: Vec<f64> = kept_weights.iter().map(|w| w / mass).collect();
    SpectralMeasure::from_weighted_real(&values, &kept_weights, DEFAULT_MERGE_TOL)
}

/// Largest Kronecker product accepted by [`tensor_independent_pair`].
pub const TENSOR_CAP: usize = 4096;

/// `(A ⊗ I_m, I_n ⊗ B)`: commuting copies whose joint distribution in the
/// normalized trace makes them classically independent.
pub fn tensor_independent_pair(a: &Matrix<f64>, b: &Matrix<f64>) -> Result<(Matrix<f64>, Matrix<f64>)> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::domain("tensor factors must be square"));
    }
    let (n, m) = (a.rows(), b.rows());
    let size = n * m;
    if size > TENSOR_CAP {
        return Err(Error::size("Kronecker product order", TENSOR_CAP, size));
    }
    let a_tilde = Matrix::from_fn(size, size, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        if k == l {
            a[(i, j)]
        } else {
            0.0
        }
    });
    let b_tilde = Matrix::from_fn(size, size, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        if i == j {
            b[(k, l)]
        } else {
            0.0
        }
    });
    Ok((a_tilde, b_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn tetrahedron() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap()
    }

    #[test]
    fn tetrahedron_top_block() {
        let x = tetrahedron();
        let l = laplacian(&x);
        let top = l.block(2, 2).map(|&v| v as f64);
        let ev = eigvalsh(&top, DEFAULT_EIGH_TOL).unwrap();
        assert!(close(&ev, &[0.0, 4.0, 4.0, 4.0], 1e-9), "{ev:?}");

        let spec = laplacian_spectrum(&x, ZERO_TOL).unwrap();
        let mu2 = &spec.grades[2].measure;
        assert_eq!(mu2.len(), 2);
        assert_eq!(mu2.atoms()[0].value.re, 0.0);
        assert!((mu2.atoms()[0].weight - 0.25).abs() < 1e-15);
        assert!((mu2.atoms()[1].value.re - 4.0).abs() < 1e-9);
        assert!((mu2.atoms()[1].weight - 0.75).abs() < 1e-15);
        assert_eq!(betti_spectral(&x, ZERO_TOL).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn point_and_circles() {
        let point = SimplicialComplex::from_facets(&[[1]]).unwrap();
        assert!(laplacian(&point).matrix().is_zero());
        let spec = laplacian_spectrum(&point, ZERO_TOL).unwrap();
        assert_eq!(spec.grades[0].measure.atoms()[0].weight, 1.0);
        assert_eq!(betti_spectral(&point, ZERO_TOL).unwrap(), vec![1]);

        let c3 = SimplicialComplex::from_facets(&[[1, 2], [2, 3], [1, 3]]).unwrap();
        assert_eq!(betti_spectral(&c3, ZERO_TOL).unwrap(), vec![1, 1]);

        let c4 = SimplicialComplex::from_facets(&[[1, 2], [2, 3], [3, 4], [1, 4]]).unwrap();
        let block = laplacian(&c4).block(0, 0).map(|&v| v as f64);
        let ev = eigvalsh(&block, DEFAULT_EIGH_TOL).unwrap();
        let circulant: Vec<f64> = {
            let mut v: Vec<f64> = (0..4)
                .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 4.0).cos())
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        assert!(close(&ev, &circulant, 1e-12), "{ev:?}");
    }

    #[test]
    fn disjoint_edges() {
        let x = SimplicialComplex::from_facets(&[[1, 2], [3, 4]]).unwrap();
        let spec = laplacian_spectrum(&x, ZERO_TOL).unwrap();
        let mu0 = &spec.grades[0].measure;
        assert_eq!(mu0.len(), 2);
        assert!((mu0.atoms()[0].weight - 0.5).abs() < 1e-15);
        assert!((mu0.atoms()[1].value.re - 2.0).abs() < 1e-12);
        assert_eq!(betti_spectral(&x, ZERO_TOL).unwrap(), vec![2, 0]);
    }

    #[test]
    fn spectrum_export() {
        let spec = laplacian_spectrum(&tetrahedron(), ZERO_TOL).unwrap();
        let text = spec.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "grade eigenvalue multiplicity");
        assert!(lines.contains(&"2 0 1"));
        assert!(lines.iter().any(|l| l.starts_with("2 4") && l.ends_with(" 3")));
    }

    #[test]
    fn rooted_measures() {
        let swap = Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let mu = rooted_spectral_measure(&swap, 1).unwrap();
        assert_eq!(mu.len(), 2);
        assert!((mu.atoms()[0].value.re + 1.0).abs() < 1e-14);
        assert!((mu.atoms()[0].weight - 0.5).abs() < 1e-14);

        let id = Matrix::identity(3);
        let mu = rooted_spectral_measure(&id, 2).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.atoms()[0].value.re - 1.0).abs() < 1e-15);
        assert!(rooted_spectral_measure(&id, 0).is_err());
        assert!(rooted_spectral_measure(&id, 4).is_err());
    }

    #[test]
    fn average_of_rooted_measures_is_the_trace_measure() {
        let m = Matrix::from_vec(
            3,
            3,
            vec![2.0, -1.0, 0.5, -1.0, 0.0, 1.5, 0.5, 1.5, -1.0],
        );
        let global = eigvalsh(&m, DEFAULT_EIGH_TOL).unwrap();
        let global_moments: Vec<f64> = (1..=6)
            .map(|k| global.iter().map(|l| l.powi(k)).sum::<f64>() / 3.0)
            .collect();
        let mut avg = vec![0.0; 6];
        for j in 1..=3 {
            let mu = rooted_spectral_measure(&m, j).unwrap();
            for (a, v) in avg.iter_mut().zip(mu.real_moments(6)) {
                *a += v / 3.0;
            }
        }
        assert!(close(&avg, &global_moments, 1e-10), "{avg:?} vs {global_moments:?}");
    }

    #[test]
    fn tensor_pair_sums_and_products() {
        let a = Matrix::from_vec(2, 2, vec![0.0, 0.0, 0.0, 1.0]);
        let b = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 2.0]);
        let (at, bt) = tensor_independent_pair(&a, &b).unwrap();
        let sum = Matrix::from_fn(4, 4, |i, j| at[(i, j)] + bt[(i, j)]);
        let ev = eigvalsh(&sum, DEFAULT_EIGH_TOL).unwrap();
        assert!(close(&ev, &[1.0, 2.0, 2.0, 3.0], 1e-14));
        let ev = eigvalsh(&at.matmul(&bt), DEFAULT_EIGH_TOL).unwrap();
        assert!(close(&ev, &[0.0, 0.0, 1.0, 2.0], 1e-14));
        // The two factors commute.
        assert_eq!(at.matmul(&bt), bt.matmul(&at));
        let big = Matrix::<f64>::identity(65);
        assert!(matches!(
            tensor_independent_pair(&big, &big),
            Err(Error::SizeLimit { .. })
        ));
    }
}
