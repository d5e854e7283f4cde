//! Persistence pairing by GF(2) column reduction of the filtration-ordered
//! boundary matrix.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::filtration::Filtration;
use super::within;
use crate::snf::symmetric_difference_into;
use crate::{Error, Result};

/// Finite and infinite bars `[birth, death)` per homological dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PersistencePairs {
    bars: Vec<Vec<(f64, f64)>>,
}

impl PersistencePairs {
    pub fn new(bars: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        for (dim, list) in bars.iter().enumerate() {
            if let Some(&(b, d)) = list.iter().find(|(b, d)| !(b < d) || b.is_nan()) {
                return Err(Error::domain(format!("bar [{b}, {d}) in dimension {dim} is empty")));
            }
        }
        Ok(PersistencePairs { bars })
    }

    pub fn maxdim(&self) -> usize {
        self.bars.len() - 1
    }

    pub fn bars(&self, dim: usize) -> &[(f64, f64)] {
        self.bars.get(dim).map_or(&[], Vec::as_slice)
    }

    /// Number of bars alive at `t`, using the same threshold test as the complexes.
    pub fn bar_count(&self, dim: usize, t: f64) -> usize {
        self.bars(dim)
            .iter()
            .filter(|&&(b, d)| within(b, t) && !within(d, t))
            .count()
    }

    /// CSV with header `dim,birth,death`; infinite deaths are written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("dim,birth,death\n");
        for (dim, list) in self.bars.iter().enumerate() {
            for &(b, d) in list {
                let _ = writeln!(s, "{dim},{b},{d}");
            }
        }
        s
    }

    pub fn from_csv(text: &str, maxdim: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut bars = vec![Vec::new(); maxdim + 1];
        for (i, rec) in reader.deserialize::<(usize, f64, f64)>().enumerate() {
            let (dim, b, d) = rec.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })?;
            if dim > maxdim {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("dimension {dim} exceeds {maxdim}"),
                });
            }
            bars[dim].push((b, d));
        }
        PersistencePairs::new(bars)
    }
}

/// Standard pairing with the clearing optimisation: dimensions are reduced
/// from the top down, and a simplex that already appeared as a pivot is known
/// to have a column that reduces to zero.
pub fn persistence_pairs(f: &Filtration) -> Result<PersistencePairs> {
    let m = f.len();
    let simplices = f.simplices();
    let births = f.births();
    let index: HashMap<&[u32], u32> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i as u32))
        .collect();

    let top = simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0);
    let mut is_pivot = vec![false; m];
    let mut nonzero = vec![false; m];
    let mut bars = vec![Vec::new(); f.maxdim() + 1];
    let mut sub = Vec::new();
    let mut scratch = Vec::new();

    for r in (1..=top).rev() {
        let mut owner: HashMap<u32, Vec<u32>> = HashMap::new();
        for (j, s) in simplices.iter().enumerate().filter(|(_, s)| s.len() == r + 1) {
            if is_pivot[j] {
                continue;
            }
            let mut col: Vec<u32> = (0..s.len())
                .map(|skip| {
                    sub.clear();
                    sub.extend(s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                    index[sub.as_slice()]
                })
                .collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match owner.get(&low) {
                    Some(other) => {
                        symmetric_difference_into(&col, other, &mut scratch);
                        std::mem::swap(&mut col, &mut scratch);
                    }
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                is_pivot[low as usize] = true;
                nonzero[j] = true;
                let (b, d) = (births[low as usize], births[j]);
                if r - 1 <= f.maxdim() && b < d {
                    bars[r - 1].push((b, d));
                }
                owner.insert(low, col);
            }
        }
    }
    for (i, s) in simplices.iter().enumerate() {
        let dim = s.len() - 1;
        if dim <= f.maxdim() && !is_pivot[i] && !nonzero[i] {
            bars[dim].push((births[i], f64::INFINITY));
        }
    }
    for list in bars.iter_mut() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    PersistencePairs::new(bars)
}
