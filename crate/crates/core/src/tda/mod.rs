//! Point clouds, Čech and Vietoris-Rips filtrations, Betti curves, persistence
//! pairs and interval-bin histograms.
//!
//! Radii follow the ball convention: two points are joined at scale `t` when
//! the closed balls of radius `t` around them meet, i.e. at distance `<= 2t`.

mod filtration;
mod meb;
mod persistence;

use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;

pub use filtration::{cech, vietoris_rips, ComplexType, Filtration, MAXDIM_CAP, SIMPLEX_CAP};
pub use persistence::{persistence_pairs, PersistencePairs};

use crate::snf::{betti_snf, Ring};
use crate::spectra::{betti_spectral, ZERO_TOL};
use crate::{Error, Rational, Result};

/// Threshold test shared by every construction: `x <= t` up to a relative slack
/// of `1e-12`, so that exact geometric coincidences survive rounding.
pub(crate) fn within(x: f64, t: f64) -> bool {
    x <= t + 1e-12 * t.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<[f64; 3]>,
    pub tag: String,
    pub seed: Option<u64>,
}

impl PointCloud {
    /// Points of a common dimension 1, 2 or 3.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if !(1..=3).contains(&dim) {
            return Err(Error::domain(format!("point dimension must be 1, 2 or 3, got {dim}")));
        }
        let mut coords = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Dimension(format!(
                    "point {} has {} coordinates, expected {dim}",
                    i + 1,
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain(format!("point {} has a non-finite coordinate", i + 1)));
            }
            let mut c = [0.0; 3];
            c[..dim].copy_from_slice(p);
            coords.push(c);
        }
        Ok(PointCloud {
            dim,
            coords,
            tag: String::new(),
            seed: None,
        })
    }

    pub fn with_metadata(mut self, tag: impl Into<String>, seed: Option<u64>) -> Self {
        self.tag = tag.into();
        self.seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i][..self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.iter().map(move |c| &c[..self.dim])
    }

    pub(crate) fn coords(&self) -> &[[f64; 3]] {
        &self.coords
    }

    /// One point per row, comma separated, shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    /// Parses one point per row; a non-numeric first row is taken as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(i + 1, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(p) => points.push(p),
                Err(_) if i == 0 && rec.iter().all(|f| f.parse::<f64>().is_err()) => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("bad coordinate: {e}"),
                    })
                }
            }
        }
        PointCloud::new(points).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Gf2,
    Spectral,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gf2" => Ok(Engine::Gf2),
            "spectral" => Ok(Engine::Spectral),
            other => Err(Error::domain(format!("unknown engine '{other}'"))),
        }
    }
}

/// Betti numbers in dimensions `0..=maxdim` sampled on a grid of radii.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiCurves {
    pub grid: Vec<f64>,
    /// `curves[i][k]` is `β_i` at `grid[k]`.
    pub curves: Vec<Vec<usize>>,
}

impl BettiCurves {
    pub fn maxdim(&self) -> usize {
        self.curves.len() - 1
    }

    pub fn at(&self, k: usize) -> Vec<usize> {
        self.curves.iter().map(|c| c[k]).collect()
    }

    /// First maximal run of consecutive grid points with the given Betti vector.
    pub fn find_window(&self, target: &[usize]) -> Option<(f64, f64)> {
        let hit = |k: usize| (0..=self.maxdim()).all(|i| self.curves[i][k] == target.get(i).copied().unwrap_or(0));
        let start = (0..self.grid.len()).find(|&k| hit(k))?;
        let end = (start..self.grid.len()).take_while(|&k| hit(k)).last()?;
        Some((self.grid[start], self.grid[end]))
    }

    /// CSV `t,b0,b1,...`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for i in 0..=self.maxdim() {
            let _ = write!(s, ",b{i}");
        }
        s.push('\n');
        for (k, t) in self.grid.iter().enumerate() {
            let _ = write!(s, "{t}");
            for c in &self.curves {
                let _ = write!(s, ",{}", c[k]);
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let width = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
            .len();
        if width < 2 {
            return Err(Error::Parse {
                line: 1,
                msg: "expected columns t,b0,...".into(),
            });
        }
        let mut grid = Vec::new();
        let mut curves = vec![Vec::new(); width - 1];
        for (i, rec) in reader.records().enumerate() {
            let bad = |msg: String| Error::Parse { line: i + 2, msg };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            grid.push(rec[0].parse::<f64>().map_err(|e| bad(e.to_string()))?);
            for (c, field) in curves.iter_mut().zip(rec.iter().skip(1)) {
                c.push(field.parse::<usize>().map_err(|e| bad(e.to_string()))?);
            }
        }
        Ok(BettiCurves { grid, curves })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveConfig {
    pub complex: ComplexType,
    pub engine: Engine,
    pub maxdim: usize,
    /// Also evaluate at every edge and triangle birth radius within the grid range.
    pub critical: bool,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            complex: ComplexType::Rips,
            engine: Engine::Gf2,
            maxdim: 2,
            critical: false,
        }
    }
}

/// Betti numbers of the filtration's complexes at each grid radius.
///
/// If the simplex cap is exceeded part way, the error carries the curves for
/// the longest grid prefix that fits.
pub fn betti_curves(cloud: &PointCloud, grid: &[f64], cfg: &CurveConfig) -> Result<BettiCurves> {
    if cloud.is_empty() {
        return Err(Error::domain("point cloud is empty"));
    }
    if grid.is_empty() {
        return Err(Error::domain("grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Order("grid must be strictly ascending".into()));
    }
    let t_max = *grid.last().expect("nonempty");
    match Filtration::new(cloud, cfg.complex, cfg.maxdim, t_max) {
        Ok(f) => curves_from_filtration(&f, grid, cfg),
        Err(e @ Error::SizeLimit { .. }) => {
            // Feasibility is monotone in t: find the longest grid prefix that fits.
            let (mut lo, mut hi) = (0usize, grid.len() - 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if Filtration::new(cloud, cfg.complex, cfg.maxdim, grid[mid]).is_ok() {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            let failed_at = grid[lo];
            let completed = if lo == 0 {
                BettiCurves {
                    grid: Vec::new(),
                    curves: vec![Vec::new(); cfg.maxdim + 1],
                }
            } else {
                let f = Filtration::new(cloud, cfg.complex, cfg.maxdim, grid[lo - 1])?;
                curves_from_filtration(&f, &grid[..lo], cfg)?
            };
            Err(Error::PartialCurves {
                t: failed_at,
                completed: Box::new(completed),
                cause: Box::new(e),
            })
        }
        Err(e) => Err(e),
    }
}

/// Betti curves of an existing filtration; the grid must not exceed its `t_max`.
pub fn curves_from_filtration(f: &Filtration, grid: &[f64], cfg: &CurveConfig) -> Result<BettiCurves> {
    let mut grid = grid.to_vec();
    if cfg.critical {
        let (lo, hi) = (grid[0], *grid.last().expect("nonempty"));
        grid.extend(
            f.simplices()
                .iter()
                .zip(f.births())
                .filter(|(s, &b)| (2..=3).contains(&s.len()) && b >= lo && b <= hi)
                .map(|(_, &b)| b),
        );
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }
    let maxdim = f.maxdim();
    let engine = cfg.engine;
    let values: Vec<Result<Vec<usize>>> = grid
        .par_iter()
        .map(|&t| {
            let x = f.complex_at(t);
            let betti = match engine {
                Engine::Gf2 => betti_snf(&x, Ring::Gf2)?,
                Engine::Spectral => betti_spectral(&x, ZERO_TOL)?,
            };
            Ok((0..=maxdim).map(|i| betti.get(i).copied().unwrap_or(0)).collect())
        })
        .collect();
    let mut curves = vec![Vec::with_capacity(grid.len()); maxdim + 1];
    for (k, v) in values.into_iter().enumerate() {
        match v {
            Ok(v) => {
                for (c, b) in curves.iter_mut().zip(v) {
                    c.push(b);
                }
            }
            Err(e) => {
                return Err(Error::PartialCurves {
                    t: grid[k],
                    completed: Box::new(BettiCurves {
                        grid: grid[..k].to_vec(),
                        curves,
                    }),
                    cause: Box::new(e),
                })
            }
        }
    }
    Ok(BettiCurves { grid, curves })
}

/// Evenly spaced grid `t_min, ..., t_max` with `steps` intervals.
pub fn linear_grid(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::domain(format!(
            "grid {t_min}:{t_max}:{steps} needs t_min < t_max and steps >= 1"
        )));
    }
    Ok((0..=steps)
        .map(|k| t_min + (t_max - t_min) * k as f64 / steps as f64)
        .collect())
}

/// Fraction of samples in each bin `[b_i, b_{i+1})`; the last bin is closed.
pub fn histogram(samples: &[f64], bins: &[f64]) -> Result<Vec<Rational>> {
    if samples.is_empty() {
        return Err(Error::domain("histogram needs at least one sample"));
    }
    if bins.len() < 2 {
        return Err(Error::domain("histogram needs at least two breakpoints"));
    }
    if bins.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Order("bin breakpoints must be strictly ascending".into()));
    }
    let (lo, hi) = (bins[0], bins[bins.len() - 1]);
    let mut counts = vec![0u64; bins.len() - 1];
    for &x in samples {
        if !(x >= lo && x <= hi) {
            return Err(Error::Coverage { value: x, lo, hi });
        }
        // Index of the last breakpoint <= x, clamped into the final closed bin.
        let k = bins.partition_point(|&b| b <= x).saturating_sub(1).min(counts.len() - 1);
        counts[k] += 1;
    }
    let total = BigInt::from(samples.len());
    Ok(counts
        .into_iter()
        .map(|c| Rational::new(BigInt::from(c), total.clone()))
        .collect())
}
