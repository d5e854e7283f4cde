use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Merge radius used when presenting eigenvalue multisets as measures.
pub const DEFAULT_MERGE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub value: Complex64,
    pub weight: f64,
}

/// Finite atomic probability measure on ℝ or ℂ.
///
/// Measures built from rational data keep an exact copy of their atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    tolerance: f64,
    exact: Option<Vec<(Rational, Rational)>>,
}

impl SpectralMeasure {
    /// Uniform weights on the points, merged within `tol`.
    pub fn from_real_points(points: &[f64], tol: f64) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        SpectralMeasure::from_weighted_real(points, &weights, tol)
    }

    pub fn from_weighted_real(points: &[f64], weights: &[f64], tol: f64) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::domain("a measure needs matching nonempty points and weights"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("atoms must be finite"));
        }
        let mut pairs: Vec<(f64, f64)> = points.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Chain consecutive values whose gap is within the merge radius.
        let mut atoms: Vec<Atom> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        let mut acc = (0.0, 0.0);
        for (x, w) in pairs {
            if !atoms.is_empty() && x - last <= tol {
                let a = atoms.last_mut().expect("nonempty");
                acc.0 += x * w;
                acc.1 += w;
                a.value = Complex64::new(acc.0 / acc.1, 0.0);
                a.weight = acc.1;
            } else {
                acc = (x * w, w);
                atoms.push(Atom {
                    value: Complex64::new(x, 0.0),
                    weight: w,
                });
            }
            last = x;
        }
        SpectralMeasure::checked(atoms, tol, None)
    }

    /// Uniform weights on complex points, greedily clustered within `tol`.
    pub fn from_complex_points(points: &[Complex64], tol: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("a measure needs at least one atom"));
        }
        let w = 1.0 / points.len() as f64;
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut atoms: Vec<(Complex64, f64)> = Vec::new();
        for z in sorted {
            // Candidates lie within tol in the real part, so only the tail is scanned.
            let hit = atoms
                .iter_mut()
                .rev()
                .take_while(|(c, _)| z.re - c.re <= 2.0 * tol)
                .find(|(c, _)| (z - *c).norm() <= tol);
            match hit {
                Some((c, weight)) => {
                    *c = (*c * *weight + z * w) / (*weight + w);
                    *weight += w;
                }
                None => atoms.push((z, w)),
            }
        }
        let atoms = atoms
            .into_iter()
            .map(|(value, weight)| Atom { value, weight })
            .collect();
        SpectralMeasure::checked(atoms, tol, None)
    }

    /// Exact measure from rational (value, weight) pairs; weights must sum to 1.
    pub fn from_rational_atoms(mut atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("a measure needs at least one atom"));
        }
        if atoms.iter().any(|(_, w)| *w <= Rational::zero()) {
            return Err(Error::domain("atom weights must be positive"));
        }
        let total: Rational = atoms.iter().map(|(_, w)| w.clone()).sum();
        if total != Rational::from_integer(1.into()) {
            return Err(Error::domain(format!("atom weights sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (v, w) in atoms {
            match merged.last_mut() {
                Some((lv, lw)) if *lv == v => *lw += w,
                _ => merged.push((v, w)),
            }
        }
        let float_atoms = merged
            .iter()
            .map(|(v, w)| Atom {
                value: Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0),
                weight: w.to_f64().unwrap_or(f64::NAN),
            })
            .collect();
        SpectralMeasure::checked(float_atoms, 0.0, Some(merged))
    }

    fn checked(atoms: Vec<Atom>, tolerance: f64, exact: Option<Vec<(Rational, Rational)>>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("atom weights sum to {total}, not 1")));
        }
        Ok(SpectralMeasure {
            atoms,
            tolerance,
            exact,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn exact_atoms(&self) -> Option<&[(Rational, Rational)]> {
        self.exact.as_deref()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Total weight of atoms within `tol` of `x`.
    pub fn weight_near(&self, x: Complex64, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.value - x).norm() <= tol)
            .map(|a| a.weight)
            .sum()
    }

    /// Real moments `Σ w λ^k`, k = 1..=k_max.
    pub fn real_moments(&self, k_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; k_max];
        for a in &self.atoms {
            let mut p = a.weight;
            for slot in out.iter_mut() {
                p *= a.value.re;
                *slot += p;
            }
        }
        out
    }

    /// Same measure shifted by `c`.
    pub fn translate(&self, c: f64) -> SpectralMeasure {
        SpectralMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    value: a.value + c,
                    weight: a.weight,
                })
                .collect(),
            tolerance: self.tolerance,
            exact: None,
        }
    }
}
