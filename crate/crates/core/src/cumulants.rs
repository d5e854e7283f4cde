//! Exact scalar moment/cumulant transforms for classical, free, Boolean and
//! monotone independence.
//!
//! For one commuting variable the multiplicative extension collapses to
//! `c_π = Π_{V∈π} c_{|V|}`, so every lattice sum only depends on the multiset of
//! block sizes of `π`. Each `(kind, n)` is therefore enumerated once into a
//! table of block-size types with their total weight and cached.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

use crate::partitions::{forest_factorial_of_spans, visit_rgs, PartitionFamily, SetPartition};
use crate::spectra::SpectralMeasure;
use crate::{Error, Rational, Result};

/// Order cap for lattice sums over all partitions.
pub const CLASSICAL_CAP: usize = 12;
/// Order cap for lattice sums over non-crossing or interval partitions.
pub const NONCROSSING_CAP: usize = 14;
/// Word-length cap for [`monotone_moment_partition`].
pub const WORD_CAP: usize = 20;
/// Order cap for [`moments_of_measure`].
pub const MEASURE_MOMENT_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CumulantKind {
    Classical,
    Free,
    Boolean,
    Monotone,
}

impl CumulantKind {
    pub const ALL: [CumulantKind; 4] = [
        CumulantKind::Classical,
        CumulantKind::Free,
        CumulantKind::Boolean,
        CumulantKind::Monotone,
    ];

    pub fn family(self) -> PartitionFamily {
        match self {
            CumulantKind::Classical => PartitionFamily::All,
            CumulantKind::Free | CumulantKind::Monotone => PartitionFamily::NonCrossing,
            CumulantKind::Boolean => PartitionFamily::Interval,
        }
    }

    pub fn order_cap(self) -> usize {
        match self {
            CumulantKind::Classical => CLASSICAL_CAP,
            _ => NONCROSSING_CAP,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CumulantKind::Classical => "classical",
            CumulantKind::Free => "free",
            CumulantKind::Boolean => "boolean",
            CumulantKind::Monotone => "monotone",
        }
    }
}

impl fmt::Display for CumulantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CumulantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CumulantKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown cumulant kind '{s}'")))
    }
}

/// Moments `m_1..m_K` of one self-adjoint variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence(Vec<Rational>);

impl MomentSequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("moment sequences need at least one entry"));
        }
        Ok(MomentSequence(values))
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        MomentSequence::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access: `get(k)` is `m_k`.
    pub fn get(&self, k: usize) -> &Rational {
        &self.0[k - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantSequence {
    kind: CumulantKind,
    values: Vec<Rational>,
}

impl CumulantSequence {
    pub fn new(kind: CumulantKind, values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("cumulant sequences need at least one entry"));
        }
        Ok(CumulantSequence { kind, values })
    }

    pub fn from_integers(kind: CumulantKind, values: &[i64]) -> Result<Self> {
        CumulantSequence::new(kind, values.iter().map(|&v| int(v)).collect())
    }

    pub fn kind(&self) -> CumulantKind {
        self.kind
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> &Rational {
        &self.values[k - 1]
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Block-size types of one order with their summed weights. The single-block
/// type `[n]` always comes first and has weight 1.
struct TypeTable {
    entries: Vec<(Vec<usize>, Rational)>,
}

fn type_table(kind: CumulantKind, n: usize) -> Arc<TypeTable> {
    static TABLES: OnceLock<Mutex<HashMap<(CumulantKind, usize), Arc<TypeTable>>>> =
        OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables.lock().expect("type table cache poisoned").get(&(kind, n)) {
        return Arc::clone(t);
    }
    let table = Arc::new(build_type_table(kind, n));
    tables
        .lock()
        .expect("type table cache poisoned")
        .entry((kind, n))
        .or_insert(table)
        .clone()
}

fn build_type_table(kind: CumulantKind, n: usize) -> TypeTable {
    // The weight of a type is an integer count, except for monotone where the
    // 1/(tree factorial) weights are accumulated per distinct factorial.
    let mut counts: BTreeMap<Vec<usize>, BTreeMap<u128, u64>> = BTreeMap::new();
    let mut sizes = Vec::with_capacity(n);
    let mut spans = Vec::with_capacity(n);
    visit_rgs(n, kind.family(), |rgs| {
        let k = rgs.iter().copied().max().unwrap_or(0) + 1;
        sizes.clear();
        sizes.resize(k, 0usize);
        for &b in rgs {
            sizes[b] += 1;
        }
        let factorial = if kind == CumulantKind::Monotone {
            spans.clear();
            spans.resize(k, (usize::MAX, 0usize));
            for (i, &b) in rgs.iter().enumerate() {
                let s = &mut spans[b];
                s.0 = s.0.min(i);
                s.1 = s.1.max(i);
            }
            forest_factorial_of_spans(&spans)
        } else {
            1
        };
        let mut key = sizes.clone();
        key.sort_unstable_by(|a, b| b.cmp(a));
        *counts.entry(key).or_default().entry(factorial).or_default() += 1;
    });

    let mut entries: Vec<(Vec<usize>, Rational)> = counts
        .into_iter()
        .map(|(key, by_factorial)| {
            let weight = by_factorial
                .into_iter()
                .map(|(f, c)| Rational::new(BigInt::from(c), BigInt::from(f)))
                .fold(Rational::zero(), |acc, w| acc + w);
            (key, weight)
        })
        .collect();
    let single = entries
        .iter()
        .position(|(key, _)| key.len() == 1)
        .expect("the one-block partition is in every family");
    entries.swap(0, single);
    debug_assert!(entries[0].1.is_one());
    TypeTable { entries }
}

fn check_order(kind: CumulantKind, k: usize) -> Result<()> {
    let cap = kind.order_cap();
    if k > cap {
        return Err(Error::size("cumulant order", cap, k));
    }
    Ok(())
}

fn product_over_type(key: &[usize], c: &[Rational]) -> Rational {
    key.iter()
        .fold(Rational::one(), |acc, &s| acc * &c[s - 1])
}

/// Solves `m_n = Σ_π weight(π) Π_{V∈π} c_{|V|}` for the cumulants.
pub fn moments_to_cumulants(m: &MomentSequence, kind: CumulantKind) -> Result<CumulantSequence> {
    check_order(kind, m.len())?;
    let mut c: Vec<Rational> = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let table = type_table(kind, n);
        // Every entry but the first only involves c_1..c_{n-1}.
        let mut rest = Rational::zero();
        for (key, w) in &table.entries[1..] {
            let prod = product_over_type(key, &c);
            if !prod.is_zero() {
                rest += w * prod;
            }
        }
        c.push(m.get(n) - rest);
    }
    CumulantSequence::new(kind, c)
}

/// Direct evaluation of the moment-cumulant lattice sum.
pub fn cumulants_to_moments(c: &CumulantSequence) -> Result<MomentSequence> {
    check_order(c.kind, c.len())?;
    let mut m = Vec::with_capacity(c.len());
    for n in 1..=c.len() {
        let table = type_table(c.kind, n);
        let mut acc = Rational::zero();
        for (key, w) in &table.entries {
            let prod = product_over_type(key, &c.values);
            if !prod.is_zero() {
                acc += w * prod;
            }
        }
        m.push(acc);
    }
    MomentSequence::new(m)
}

/// Moments of the additive convolution through cumulant additivity.
///
/// Monotone cumulants are only additive for identically distributed summands,
/// so the binary monotone convolution is rejected; see [`iid_convolve_rescaled`].
pub fn convolve(a: &MomentSequence, b: &MomentSequence, kind: CumulantKind) -> Result<MomentSequence> {
    if kind == CumulantKind::Monotone {
        return Err(Error::UnsupportedKind(
            "monotone convolution of distinct distributions".into(),
        ));
    }
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "moment sequences of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let ca = moments_to_cumulants(a, kind)?;
    let cb = moments_to_cumulants(b, kind)?;
    let sum = ca.values.iter().zip(&cb.values).map(|(x, y)| x + y).collect();
    cumulants_to_moments(&CumulantSequence::new(kind, sum)?)
}

/// Moments of `N^{-1/2}(X_1 + ... + X_N)` for `N` identically distributed,
/// independent copies of a centered variable.
///
/// The order-`k` cumulant is scaled by `N^{1-k/2}`. Odd orders need `√N`, so
/// `N` must be a perfect square unless every odd cumulant vanishes.
pub fn iid_convolve_rescaled(
    m: &MomentSequence,
    copies: u64,
    kind: CumulantKind,
) -> Result<MomentSequence> {
    if copies == 0 {
        return Err(Error::Precondition("the number of summands must be positive".into()));
    }
    if !m.get(1).is_zero() {
        return Err(Error::Precondition(format!(
            "the variable must be centered, got m1 = {}",
            m.get(1)
        )));
    }
    let c = moments_to_cumulants(m, kind)?;
    let n = BigInt::from(copies);
    let root = copies.sqrt();
    let exact_root = (root * root == copies).then(|| BigInt::from(root));

    let mut scaled = Vec::with_capacity(c.len());
    for (idx, ck) in c.values.iter().enumerate() {
        let k = idx + 1;
        if ck.is_zero() {
            scaled.push(Rational::zero());
            continue;
        }
        // N^{1-k/2} = N / (√N)^k.
        let factor = if k % 2 == 0 {
            let half = (k / 2) as u32;
            Rational::new(n.clone(), n.pow(half))
        } else {
            let r = exact_root.as_ref().ok_or_else(|| {
                Error::Precondition(format!(
                    "odd cumulant c{k} = {ck} is nonzero and {copies} is not a perfect square"
                ))
            })?;
            Rational::new(n.clone(), r.pow(k as u32))
        };
        scaled.push(ck * factor);
    }
    cumulants_to_moments(&CumulantSequence::new(kind, scaled)?)
}

/// The non-crossing partition that evaluates a mixed moment of monotone
/// independent algebras, for the word of algebra indices `word[0..m]`.
///
/// Algebras are processed in increasing index order. The positions of each
/// algebra are grouped so that two positions share a block iff no block placed
/// earlier separates them (has elements both strictly between and outside).
pub fn monotone_moment_partition(word: &[usize]) -> Result<SetPartition> {
    let m = word.len();
    if m == 0 {
        return Err(Error::domain("empty word"));
    }
    if m > WORD_CAP {
        return Err(Error::size("word length", WORD_CAP, m));
    }
    if word.contains(&0) {
        return Err(Error::domain("algebra indices must be positive"));
    }
    let mut indices: Vec<usize> = word.to_vec();
    indices.sort_unstable();
    indices.dedup();

    let mut placed: Vec<Vec<usize>> = Vec::new();
    for j in indices {
        let positions: Vec<usize> = (1..=m).filter(|&p| word[p - 1] == j).collect();
        let separated = |p: usize, q: usize| {
            placed.iter().any(|block| {
                let inside = block.iter().any(|&x| p < x && x < q);
                let outside = block.iter().any(|&x| x < p || x > q);
                inside && outside
            })
        };
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &p in &positions {
            match groups.iter_mut().find(|g| !separated(g[0], p)) {
                Some(g) => g.push(p),
                None => groups.push(vec![p]),
            }
        }
        placed.extend(groups);
    }
    SetPartition::new(m, placed)
}

/// Moments of a point measure, exact when all atoms carry rational data.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureMoments {
    Exact(MomentSequence),
    Inexact(Vec<f64>),
}

impl MeasureMoments {
    pub fn as_f64(&self) -> Vec<f64> {
        match self {
            MeasureMoments::Exact(m) => m
                .values()
                .iter()
                .map(|v| v.to_f64().unwrap_or(f64::NAN))
                .collect(),
            MeasureMoments::Inexact(v) => v.clone(),
        }
    }
}

pub fn moments_of_measure(mu: &SpectralMeasure, k: usize) -> Result<MeasureMoments> {
    if k == 0 {
        return Err(Error::domain("at least one moment is required"));
    }
    if k > MEASURE_MOMENT_CAP {
        return Err(Error::size("measure moment order", MEASURE_MOMENT_CAP, k));
    }
    if let Some(a) = mu.atoms().iter().find(|a| a.value.im != 0.0) {
        return Err(Error::domain(format!("complex atom {} has no real moments", a.value)));
    }
    if let Some(exact) = mu.exact_atoms() {
        let mut out = vec![Rational::zero(); k];
        for (value, weight) in exact {
            let mut power = weight.clone();
            for slot in out.iter_mut() {
                power *= value;
                *slot += &power;
            }
        }
        return Ok(MeasureMoments::Exact(MomentSequence::new(out)?));
    }
    let mut out = vec![0.0; k];
    for atom in mu.atoms() {
        let mut power = atom.weight;
        for slot in out.iter_mut() {
            power *= atom.value.re;
            *slot += power;
        }
    }
    Ok(MeasureMoments::Inexact(out))
}

/// Parses `p/q`, an integer, or a finite decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 0,
        msg: format!("malformed rational '{s}'"),
    };
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let whole: BigInt = if whole_abs.is_empty() {
            BigInt::zero()
        } else {
            whole_abs.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let value = Rational::new(whole * &scale + frac_num, scale);
        return Ok(if negative { -value } else { value });
    }
    s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
