//! Set partitions of `{1..n}` and the lattices 𝒫(n) ⊇ NC(n) ⊇ I(n).
//!
//! Partitions are enumerated as restricted growth strings (block labels assigned
//! in order of first appearance), which yields a lexicographic order on the
//! block-min representation. The non-crossing and interval families are
//! generated directly by pruning, so NC(14) never touches the 190M elements
//! of 𝒫(14).

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Rational, Result};

/// Largest ground set accepted by [`enumerate`].
pub const ENUMERATION_CAP: usize = 12;
/// Largest ground set accepted by [`mobius`].
pub const MOBIUS_CAP: usize = 8;

/// A partition of `{1..n}`. Blocks are sorted ascending and ordered by their minimum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionFamily {
    All,
    NonCrossing,
    Interval,
}

impl PartitionFamily {
    pub fn contains(self, p: &SetPartition) -> bool {
        match self {
            PartitionFamily::All => true,
            PartitionFamily::NonCrossing => p.is_noncrossing(),
            PartitionFamily::Interval => p.is_interval(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_noncrossing: bool,
    pub is_interval: bool,
}

impl SetPartition {
    /// Validates and normalizes arbitrary blocks of 1-based elements.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("partition ground set must be nonempty"));
        }
        let mut seen = vec![false; n + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::domain("partition blocks must be nonempty"));
            }
            for &x in b {
                if x == 0 || x > n {
                    return Err(Error::domain(format!("element {x} outside 1..={n}")));
                }
                if seen[x] {
                    return Err(Error::domain(format!("element {x} appears twice")));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = (1..=n).find(|&x| !seen[x]) {
            return Err(Error::domain(format!("element {missing} is not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks })
    }

    /// Builds a partition from a restricted growth string (0-based block labels).
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition {
            n: rgs.len(),
            blocks,
        }
    }

    /// The minimum 0_n: all singletons.
    pub fn finest(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n).map(|i| vec![i]).collect(),
        }
    }

    /// The maximum 1_n: a single block.
    pub fn coarsest(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(1..=n).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Block label (0-based, in order of block minima) of every element.
    pub fn rgs(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x - 1] = b;
            }
        }
        out
    }

    pub fn is_noncrossing(&self) -> bool {
        // Two blocks cross iff some arc between consecutive elements of one
        // interleaves with an arc of the other.
        let arcs: Vec<(usize, usize, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, block)| block.windows(2).map(move |w| (b, w[0], w[1])))
            .collect();
        for &(b1, x, y) in &arcs {
            for &(b2, u, v) in &arcs {
                if b1 != b2 && x < u && u < y && y < v {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_interval(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b[b.len() - 1] - b[0] + 1 == b.len())
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn classify(p: &SetPartition) -> Classification {
    Classification {
        is_noncrossing: p.is_noncrossing(),
        is_interval: p.is_interval(),
    }
}

/// Visits every partition of `{1..n}` in the family as a restricted growth
/// string, in lexicographic order. No size cap is applied here.
pub(crate) fn visit_rgs(n: usize, family: PartitionFamily, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        return;
    }
    let mut state = RgsState {
        rgs: vec![0; n],
        first: Vec::with_capacity(n),
        last: Vec::with_capacity(n),
        family,
    };
    state.first.push(0);
    state.last.push(0);
    state.extend(1, &mut visit);
}

struct RgsState {
    rgs: Vec<usize>,
    first: Vec<usize>,
    last: Vec<usize>,
    family: PartitionFamily,
}

impl RgsState {
    fn can_join(&self, i: usize, b: usize) -> bool {
        match self.family {
            PartitionFamily::All => true,
            PartitionFamily::Interval => self.rgs[i - 1] == b,
            PartitionFamily::NonCrossing => {
                let l = self.last[b];
                (l + 1..i).all(|j| {
                    let c = self.rgs[j];
                    c == b || self.first[c] > l
                })
            }
        }
    }

    fn extend(&mut self, i: usize, visit: &mut impl FnMut(&[usize])) {
        let n = self.rgs.len();
        if i == n {
            visit(&self.rgs);
            return;
        }
        let k = self.first.len();
        for b in 0..k {
            if self.can_join(i, b) {
                let prev = self.last[b];
                self.rgs[i] = b;
                self.last[b] = i;
                self.extend(i + 1, visit);
                self.last[b] = prev;
            }
        }
        self.rgs[i] = k;
        self.first.push(i);
        self.last.push(i);
        self.extend(i + 1, visit);
        self.first.pop();
        self.last.pop();
    }
}

/// Every partition of the family, each exactly once, in lexicographic
/// restricted-growth order.
pub fn enumerate(n: usize, family: PartitionFamily) -> Result<Vec<SetPartition>> {
    if n == 0 || n > ENUMERATION_CAP {
        return Err(Error::size("partition ground set", ENUMERATION_CAP, n));
    }
    let mut out = Vec::new();
    visit_rgs(n, family, |rgs| out.push(SetPartition::from_rgs(rgs)));
    Ok(out)
}

/// Reverse refinement: `p <= q` iff every block of `p` lies inside a block of `q`.
pub fn leq(p: &SetPartition, q: &SetPartition) -> Result<bool> {
    if p.n != q.n {
        return Err(Error::Dimension(format!(
            "partitions of {} and {} elements are incomparable",
            p.n, q.n
        )));
    }
    Ok(refines(&p.blocks, &q.rgs()))
}

fn refines(blocks: &[Vec<usize>], coarse_rgs: &[usize]) -> bool {
    blocks.iter().all(|b| {
        let label = coarse_rgs[b[0] - 1];
        b.iter().all(|&x| coarse_rgs[x - 1] == label)
    })
}

/// Möbius function of the family's poset on `[p, q]`.
///
/// The interval is enumerated, ordered by decreasing block count (a linear
/// extension, so its zeta matrix is unitriangular) and the row of `p` in the
/// inverse zeta matrix is obtained by exact substitution.
pub fn mobius(family: PartitionFamily, p: &SetPartition, q: &SetPartition) -> Result<Rational> {
    if p.n != q.n {
        return Err(Error::Dimension(format!(
            "partitions of {} and {} elements",
            p.n, q.n
        )));
    }
    if p.n > MOBIUS_CAP {
        return Err(Error::size("Möbius ground set", MOBIUS_CAP, p.n));
    }
    for r in [p, q] {
        if !family.contains(r) {
            return Err(Error::Membership(format!("{r} is not in {family:?}")));
        }
    }
    if !leq(p, q)? {
        return Err(Error::Order(format!("{p} is not below {q}")));
    }

    let p_rgs = p.rgs();
    let q_rgs = q.rgs();
    let mut interval: Vec<SetPartition> = Vec::new();
    visit_rgs(p.n, family, |rgs| {
        let r = SetPartition::from_rgs(rgs);
        if refines(&p.blocks, rgs) && refines(&r.blocks, &q_rgs) {
            interval.push(r);
        }
    });
    interval.sort_by_key(|r| std::cmp::Reverse(r.num_blocks()));
    debug_assert_eq!(interval[0].rgs(), p_rgs);

    let rgs: Vec<Vec<usize>> = interval.iter().map(SetPartition::rgs).collect();
    let mut row: Vec<Rational> = vec![Rational::zero(); interval.len()];
    row[0] = Rational::one();
    for s in 1..interval.len() {
        let mut acc = Rational::zero();
        for r in 0..s {
            if !row[r].is_zero() && refines(&interval[r].blocks, &rgs[s]) {
                acc += &row[r];
            }
        }
        row[s] = -acc;
    }
    // q is the unique coarsest element of the interval.
    let q_pos = rgs
        .iter()
        .position(|r| *r == q_rgs)
        .expect("q belongs to its own interval");
    Ok(row.swap_remove(q_pos))
}

/// Nesting forest factorial of a non-crossing partition: the product over all
/// blocks of the number of blocks in the subtree rooted there.
///
/// Block `W` is a child of the innermost block `V` with
/// `min V < min W <= max W < max V`.
pub fn nesting_forest_factorial(p: &SetPartition) -> Result<BigUint> {
    if !p.is_noncrossing() {
        return Err(Error::domain(format!("{p} is crossing")));
    }
    let spans: Vec<(usize, usize)> = p.blocks.iter().map(|b| (b[0], b[b.len() - 1])).collect();
    Ok(BigUint::from(1u32) * forest_factorial_of_spans(&spans))
}

/// Same product as [`nesting_forest_factorial`], over (min, max) spans sorted by min.
pub(crate) fn forest_factorial_of_spans(spans: &[(usize, usize)]) -> u128 {
    let k = spans.len();
    let mut size = vec![1u128; k];
    // Parents have smaller minima, so accumulate from the largest minimum down.
    for w in (0..k).rev() {
        let (lo, hi) = spans[w];
        let parent = (0..w).rev().find(|&v| spans[v].0 < lo && hi < spans[v].1);
        if let Some(v) = parent {
            size[v] += size[w];
        }
    }
    size.iter().product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn brute_noncrossing(p: &SetPartition) -> bool {
        let r = p.rgs();
        let n = r.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if r[a] == r[c] && r[b] == r[d] && r[a] != r[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn brute_interval(p: &SetPartition) -> bool {
        let r = p.rgs();
        let n = r.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if r[a] == r[c] && r[a] != r[b] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn bell(n: usize) -> usize {
        // Bell triangle.
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    fn catalan(n: usize) -> usize {
        let mut c = 1usize;
        for i in 0..n {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate(4, PartitionFamily::All).unwrap().len(), 15);
        assert_eq!(enumerate(4, PartitionFamily::NonCrossing).unwrap().len(), 14);
        assert_eq!(
            enumerate(1, PartitionFamily::Interval).unwrap(),
            vec![SetPartition::finest(1)]
        );
        for n in 1..=8 {
            assert_eq!(enumerate(n, PartitionFamily::All).unwrap().len(), bell(n));
            assert_eq!(
                enumerate(n, PartitionFamily::NonCrossing).unwrap().len(),
                catalan(n)
            );
            assert_eq!(
                enumerate(n, PartitionFamily::Interval).unwrap().len(),
                1 << (n - 1)
            );
        }
    }

    #[test]
    fn enumeration_cap() {
        assert!(matches!(
            enumerate(13, PartitionFamily::Interval),
            Err(Error::SizeLimit { .. })
        ));
        assert!(enumerate(0, PartitionFamily::All).is_err());
    }

    #[test]
    fn filtered_families_agree_with_predicates() {
        for n in 1..=7 {
            let all = enumerate(n, PartitionFamily::All).unwrap();
            let nc: Vec<_> = all.iter().filter(|p| brute_noncrossing(p)).cloned().collect();
            let int: Vec<_> = all.iter().filter(|p| brute_interval(p)).cloned().collect();
            assert_eq!(enumerate(n, PartitionFamily::NonCrossing).unwrap(), nc);
            assert_eq!(enumerate(n, PartitionFamily::Interval).unwrap(), int);
            for p in &all {
                let c = classify(p);
                assert_eq!(c.is_noncrossing, brute_noncrossing(p), "{p}");
                assert_eq!(c.is_interval, brute_interval(p), "{p}");
                assert!(!c.is_interval || c.is_noncrossing);
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let all = enumerate(5, PartitionFamily::All).unwrap();
        for w in all.windows(2) {
            assert!(w[0].rgs() < w[1].rgs());
        }
    }

    #[test]
    fn classify_examples() {
        let crossing = part(4, &[&[1, 3], &[2, 4]]);
        assert_eq!(
            classify(&crossing),
            Classification {
                is_noncrossing: false,
                is_interval: false
            }
        );
        let notation = part(8, &[&[1, 3, 4, 6], &[2, 8], &[5, 7]]);
        assert!(!notation.is_noncrossing() && !notation.is_interval());
        let contiguous = part(4, &[&[1, 2], &[3, 4]]);
        assert!(contiguous.is_noncrossing() && contiguous.is_interval());
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(SetPartition::new(3, vec![vec![1, 2]]).is_err());
        assert!(SetPartition::new(3, vec![vec![1, 2], vec![2, 3]]).is_err());
        assert!(SetPartition::new(3, vec![vec![1, 2, 3], vec![]]).is_err());
        assert!(SetPartition::new(3, vec![vec![1, 4], vec![2, 3]]).is_err());
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&SetPartition::finest(3), &SetPartition::coarsest(3)).unwrap());
        assert!(!leq(&part(3, &[&[1, 2], &[3]]), &part(3, &[&[1, 3], &[2]])).unwrap());
        assert!(leq(&part(4, &[&[1], &[2], &[3, 4]]), &part(4, &[&[1, 2], &[3, 4]])).unwrap());
        assert!(matches!(
            leq(&SetPartition::finest(3), &SetPartition::finest(4)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn mobius_examples() {
        let m = |f, n| mobius(f, &SetPartition::finest(n), &SetPartition::coarsest(n)).unwrap();
        assert_eq!(m(PartitionFamily::Interval, 4), Rational::from_integer((-1).into()));
        assert_eq!(m(PartitionFamily::NonCrossing, 4), Rational::from_integer((-5).into()));
        assert_eq!(m(PartitionFamily::All, 3), Rational::from_integer(2.into()));
        // Closed forms: (-1)^(n-1) (n-1)! on 𝒫(n), signed Catalan on NC(n).
        assert_eq!(m(PartitionFamily::All, 5), Rational::from_integer(24.into()));
        assert_eq!(m(PartitionFamily::NonCrossing, 6), Rational::from_integer((-42).into()));
        assert_eq!(m(PartitionFamily::Interval, 6), Rational::from_integer((-1).into()));
    }

    #[test]
    fn mobius_errors() {
        let crossing = part(4, &[&[1, 3], &[2, 4]]);
        assert!(matches!(
            mobius(PartitionFamily::NonCrossing, &crossing, &SetPartition::coarsest(4)),
            Err(Error::Membership(_))
        ));
        assert!(matches!(
            mobius(
                PartitionFamily::All,
                &SetPartition::coarsest(3),
                &SetPartition::finest(3)
            ),
            Err(Error::Order(_))
        ));
        assert!(matches!(
            mobius(
                PartitionFamily::Interval,
                &SetPartition::finest(9),
                &SetPartition::coarsest(9)
            ),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn mobius_inverts_zeta() {
        for family in [
            PartitionFamily::All,
            PartitionFamily::NonCrossing,
            PartitionFamily::Interval,
        ] {
            for n in 1..=5 {
                let elems = enumerate(n, family).unwrap();
                for p in &elems {
                    for q in &elems {
                        if !leq(p, q).unwrap() {
                            continue;
                        }
                        let mut sum = Rational::zero();
                        for r in &elems {
                            if leq(p, r).unwrap() && leq(r, q).unwrap() {
                                sum += mobius(family, p, r).unwrap();
                            }
                        }
                        let expected = if p == q { Rational::one() } else { Rational::zero() };
                        assert_eq!(sum, expected, "{family:?} [{p}, {q}]");
                    }
                }
            }
        }
    }

    #[test]
    fn nesting_forest_examples() {
        let f = |n, b: &[&[usize]]| nesting_forest_factorial(&part(n, b)).unwrap();
        assert_eq!(f(4, &[&[1, 2], &[3, 4]]), BigUint::from(1u32));
        assert_eq!(f(4, &[&[1, 4], &[2, 3]]), BigUint::from(2u32));
        assert_eq!(f(6, &[&[1, 6], &[2, 3], &[4, 5]]), BigUint::from(3u32));
        // Chain of three nested pairs: 3 * 2 * 1.
        assert_eq!(f(6, &[&[1, 6], &[2, 5], &[3, 4]]), BigUint::from(6u32));
        assert!(matches!(
            nesting_forest_factorial(&part(4, &[&[1, 3], &[2, 4]])),
            Err(Error::Domain(_))
        ));
    }
}
