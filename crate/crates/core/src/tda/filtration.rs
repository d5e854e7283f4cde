//! Vietoris-Rips and Čech filtrations by clique expansion.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::meb::{dist, min_enclosing_radius, P3};
use super::{within, PointCloud};
use crate::simplicial::{Face, SimplicialComplex};
use crate::{Error, Result};

/// Largest number of simplices (all dimensions) a filtration may hold.
pub const SIMPLEX_CAP: usize = 200_000;
/// Largest supported simplex dimension of a complex built by [`vietoris_rips`] or [`cech`].
pub const MAXDIM_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComplexType {
    Rips,
    Cech,
}

impl FromStr for ComplexType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rips" | "vr" => Ok(ComplexType::Rips),
            "cech" => Ok(ComplexType::Cech),
            other => Err(Error::domain(format!("unknown complex type '{other}'"))),
        }
    }
}

impl fmt::Display for ComplexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexType::Rips => "rips",
            ComplexType::Cech => "cech",
        })
    }
}

/// Simplices of a growing family of complexes with their birth radii, in
/// filtration order: by birth, then dimension, then lexicographically. Every
/// face precedes its cofaces.
#[derive(Clone, Debug)]
pub struct Filtration {
    n_vertices: usize,
    simplices: Vec<Face>,
    births: Vec<f64>,
    homology_dim: usize,
    simplex_dim: usize,
    t_max: f64,
}

impl Filtration {
    /// Filtration up to radius `t_max`, with simplices up to dimension
    /// `maxdim + 1` so that homology is complete in dimensions `0..=maxdim`.
    pub fn new(cloud: &PointCloud, kind: ComplexType, maxdim: usize, t_max: f64) -> Result<Self> {
        if maxdim > MAXDIM_CAP {
            return Err(Error::size("homological dimension", MAXDIM_CAP, maxdim));
        }
        let mut f = build(cloud, kind, maxdim + 1, t_max, SIMPLEX_CAP)?;
        f.homology_dim = maxdim;
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Face] {
        &self.simplices
    }

    pub fn births(&self) -> &[f64] {
        &self.births
    }

    /// Homological dimensions covered exactly: `0..=maxdim`.
    pub fn maxdim(&self) -> usize {
        self.homology_dim
    }

    pub fn simplex_dim(&self) -> usize {
        self.simplex_dim
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Distinct birth radii in ascending order.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut t = self.births.clone();
        t.dedup();
        t
    }

    /// The complex of all simplices born by `t`.
    pub fn complex_at(&self, t: f64) -> SimplicialComplex {
        let mut faces: Vec<Vec<Face>> = vec![Vec::new(); self.simplex_dim + 1];
        for (s, &b) in self.simplices.iter().zip(&self.births) {
            if !within(b, t) {
                // Births are sorted, so nothing later qualifies.
                break;
            }
            faces[s.len() - 1].push(s.clone());
        }
        for fs in faces.iter_mut() {
            fs.sort_unstable();
        }
        SimplicialComplex::from_graded_faces_unchecked(faces)
    }
}

pub(crate) fn build(
    cloud: &PointCloud,
    kind: ComplexType,
    simplex_dim: usize,
    t_max: f64,
    cap: usize,
) -> Result<Filtration> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::domain(format!("radius must be finite and >= 0, got {t_max}")));
    }
    let pts = cloud.coords();
    let n = pts.len();
    if n > cap {
        return Err(Error::size("filtration simplex count", cap, n));
    }

    // Upper neighbour lists at the largest radius.
    let mut upper: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if within(dist(&pts[i], &pts[j]) / 2.0, t_max) {
                upper[i].push(j as u32);
            }
        }
    }

    let mut simplices: Vec<(Face, f64)> = (0..n as u32).map(|v| (vec![v], 0.0)).collect();
    let mut expander = Expander {
        pts,
        kind,
        t_max,
        simplex_dim,
        cap,
        upper: &upper,
        out: &mut simplices,
        scratch: Vec::with_capacity(simplex_dim + 1),
    };
    for v in 0..n as u32 {
        let cands = upper[v as usize].clone();
        expander.expand(&mut vec![v], 0.0, &cands)?;
    }

    if kind == ComplexType::Cech {
        enforce_monotone(&mut simplices);
    }
    simplices.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.len().cmp(&b.0.len()))
            .then_with(|| a.0.cmp(&b.0))
    });
    let (simplices, births) = simplices.into_iter().unzip();
    Ok(Filtration {
        n_vertices: n,
        simplices,
        births,
        homology_dim: simplex_dim.saturating_sub(1),
        simplex_dim,
        t_max,
    })
}

struct Expander<'a> {
    pts: &'a [P3],
    kind: ComplexType,
    t_max: f64,
    simplex_dim: usize,
    cap: usize,
    upper: &'a [Vec<u32>],
    out: &'a mut Vec<(Face, f64)>,
    scratch: Vec<P3>,
}

impl Expander<'_> {
    /// Adds every simplex extending `clique` by vertices from `cands` (common
    /// upper neighbours of the clique, ascending).
    fn expand(&mut self, clique: &mut Vec<u32>, birth: f64, cands: &[u32]) -> Result<()> {
        if clique.len() > self.simplex_dim {
            return Ok(());
        }
        for (idx, &c) in cands.iter().enumerate() {
            let rips = clique
                .iter()
                .map(|&u| dist(&self.pts[u as usize], &self.pts[c as usize]) / 2.0)
                .fold(birth, f64::max);
            let b = match self.kind {
                ComplexType::Rips => rips,
                ComplexType::Cech => {
                    if clique.len() == 1 {
                        rips
                    } else {
                        self.scratch.clear();
                        self.scratch.extend(clique.iter().map(|&u| self.pts[u as usize]));
                        self.scratch.push(self.pts[c as usize]);
                        min_enclosing_radius(&self.scratch).max(rips)
                    }
                }
            };
            if !within(b, self.t_max) {
                continue;
            }
            clique.push(c);
            if self.out.len() >= self.cap {
                return Err(Error::size("filtration simplex count", self.cap, self.out.len() + 1));
            }
            self.out.push((clique.clone(), b));
            if clique.len() <= self.simplex_dim {
                let next: Vec<u32> = intersect_sorted(&cands[idx + 1..], &self.upper[c as usize]);
                if !next.is_empty() {
                    self.expand(clique, b, &next)?;
                }
            }
            clique.pop();
        }
        Ok(())
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Rounding can make an enclosing radius of a face exceed that of a coface by
/// an ulp; lift each birth to the maximum over its facets.
fn enforce_monotone(simplices: &mut [(Face, f64)]) {
    simplices.sort_by_key(|(f, _)| f.len());
    let mut index: HashMap<Face, f64> = HashMap::with_capacity(simplices.len());
    let mut sub = Vec::new();
    for (face, birth) in simplices.iter_mut() {
        if face.len() > 2 {
            for skip in 0..face.len() {
                sub.clear();
                sub.extend(face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                if let Some(&b) = index.get(&sub) {
                    *birth = birth.max(b);
                }
            }
        }
        index.insert(face.clone(), *birth);
    }
}

fn complex_at_radius(cloud: &PointCloud, kind: ComplexType, t: f64, maxdim: usize) -> Result<SimplicialComplex> {
    if maxdim > MAXDIM_CAP {
        return Err(Error::size("complex dimension", MAXDIM_CAP, maxdim));
    }
    if cloud.is_empty() {
        return Err(Error::domain("point cloud is empty"));
    }
    Ok(build(cloud, kind, maxdim, t, SIMPLEX_CAP)?.complex_at(t))
}

/// Edges between points at distance at most `2t`, filled in by clique
/// expansion up to dimension `maxdim`.
pub fn vietoris_rips(cloud: &PointCloud, t: f64, maxdim: usize) -> Result<SimplicialComplex> {
    complex_at_radius(cloud, ComplexType::Rips, t, maxdim)
}

/// Simplices whose vertices have a minimal enclosing ball of radius at most `t`.
pub fn cech(cloud: &PointCloud, t: f64, maxdim: usize) -> Result<SimplicialComplex> {
    complex_at_radius(cloud, ComplexType::Cech, t, maxdim)
}

impl Filtration {
    pub fn num_vertices(&self) -> usize {
        self.n_vertices
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(s: f64) -> PointCloud {
        PointCloud::new(vec![vec![0.0, 0.0], vec![s, 0.0], vec![s / 2.0, s * 3f64.sqrt() / 2.0]]).unwrap()
    }

    #[test]
    fn rips_triangle() {
        let x = vietoris_rips(&triangle(1.0), 0.5, 2).unwrap();
        assert_eq!(x.counts(), vec![3, 3, 1]);
        let x = vietoris_rips(&triangle(1.0), 0.0, 2).unwrap();
        assert_eq!(x.counts(), vec![3]);
    }

    #[test]
    fn rips_threshold_is_closed() {
        let two = PointCloud::new(vec![vec![0.0], vec![3.0]]).unwrap();
        assert_eq!(vietoris_rips(&two, 1.5, 1).unwrap().counts(), vec![2, 1]);
        assert_eq!(vietoris_rips(&two, 1.5 - 1e-6, 1).unwrap().counts(), vec![2]);
    }

    #[test]
    fn cech_triangle_times() {
        let s = 1.0;
        let c = triangle(s);
        let r = s / 3f64.sqrt();
        assert_eq!(cech(&c, s / 2.0, 2).unwrap().counts(), vec![3, 3]);
        assert_eq!(cech(&c, r - 1e-9, 2).unwrap().counts(), vec![3, 3]);
        assert_eq!(cech(&c, r, 2).unwrap().counts(), vec![3, 3, 1]);
        assert_eq!(cech(&c, s / 2.0 - 1e-9, 2).unwrap().counts(), vec![3]);
    }

    #[test]
    fn filtration_is_face_ordered() {
        let pts: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let a = i as f64 * 0.7;
                vec![a.cos() * (1.0 + 0.1 * i as f64), a.sin(), (0.3 * i as f64).sin()]
            })
            .collect();
        let cloud = PointCloud::new(pts).unwrap();
        for kind in [ComplexType::Rips, ComplexType::Cech] {
            let f = Filtration::new(&cloud, kind, 2, 1.0).unwrap();
            let pos: HashMap<&Face, usize> = f.simplices().iter().enumerate().map(|(i, s)| (s, i)).collect();
            for (i, s) in f.simplices().iter().enumerate() {
                if s.len() > 1 {
                    for skip in 0..s.len() {
                        let mut sub = s.clone();
                        sub.remove(skip);
                        assert!(pos[&sub] < i);
                        assert!(f.births()[pos[&sub]] <= f.births()[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64 * 1e-3]).collect();
        let cloud = PointCloud::new(pts).unwrap();
        let err = vietoris_rips(&cloud, 1.0, 3).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { .. }), "{err}");
    }
}
