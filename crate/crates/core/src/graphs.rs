//! Rooted graphs, star products and walk counts at the root.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cumulants::{CumulantKind, CumulantSequence, MomentSequence};
use crate::matrix::Matrix;
use crate::{Error, Rational, Result};

pub const MOMENT_ORDER_CAP: usize = 20;
pub const MOMENT_VERTEX_CAP: usize = 200;
pub const IRREDUCIBLE_ORDER_CAP: usize = 16;
pub const IRREDUCIBLE_VERTEX_CAP: usize = 100;

/// Simple undirected graph with a distinguished vertex. Vertices are 1-based in
/// the public API.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    n: usize,
    /// Sorted neighbour lists, 0-based.
    adj: Vec<Vec<usize>>,
    root: usize,
}

impl RootedGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("a rooted graph needs at least one vertex"));
        }
        if root == 0 || root > n {
            return Err(Error::domain(format!("root {root} is outside 1..={n}")));
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::domain(format!("edge ({u}, {v}) has a vertex outside 1..={n}")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at vertex {u}")));
            }
            sets[u - 1].insert(v - 1);
            sets[v - 1].insert(u - 1);
        }
        Ok(RootedGraph {
            n,
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            root: root - 1,
        })
    }

    pub fn single_vertex() -> Self {
        RootedGraph::new(1, &[], 1).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based root.
    pub fn root(&self) -> usize {
        self.root + 1
    }

    /// Edges as 1-based pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs.iter().filter(|&&v| v > u) {
                out.push((u + 1, v + 1));
            }
        }
        out
    }

    pub fn adjacency(&self) -> Matrix<i64> {
        let mut a = Matrix::zeros(self.n, self.n);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                a[(u, v)] = 1;
            }
        }
        a
    }

    /// Parses "n root" followed by one "u v" edge per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing \"n root\" header".into(),
        })?;
        let [n, root] = parse_pair(line, header)?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let [u, v] = parse_pair(line, l)?;
            edges.push((u, v));
        }
        RootedGraph::new(n, &edges, root).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.root());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2]> {
    let fields: Vec<&str> = l.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line,
            msg: format!("expected two integers, found {} fields", fields.len()),
        });
    }
    let mut out = [0; 2];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("'{f}' is not a non-negative integer"),
        })?;
    }
    Ok(out)
}

/// Disjoint union with the two roots identified; the shared vertex is the new root.
pub fn star_product(g1: &RootedGraph, g2: &RootedGraph) -> RootedGraph {
    let n = g1.n + g2.n - 1;
    // Vertices of g2 other than its root are appended after g1's vertices.
    let relabel = |v: usize| -> usize {
        match v.cmp(&g2.root) {
            std::cmp::Ordering::Equal => g1.root,
            std::cmp::Ordering::Less => g1.n + v,
            std::cmp::Ordering::Greater => g1.n + v - 1,
        }
    };
    let mut edges: Vec<(usize, usize)> = g1.edges();
    edges.extend(
        g2.edges()
            .into_iter()
            .map(|(u, v)| (relabel(u - 1) + 1, relabel(v - 1) + 1)),
    );
    RootedGraph::new(n, &edges, g1.root + 1).expect("star product of valid graphs is valid")
}

fn check_caps(g: &RootedGraph, k: usize, order_cap: usize, vertex_cap: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("order K must be at least 1"));
    }
    if k > order_cap {
        return Err(Error::size("walk length K", order_cap, k));
    }
    if g.n > vertex_cap {
        return Err(Error::size("graph vertex count", vertex_cap, g.n));
    }
    Ok(())
}

/// `m_k = (A^k)_{root,root}` for `k = 1..=K`, exactly.
pub fn root_moments(g: &RootedGraph, k: usize) -> Result<MomentSequence> {
    check_caps(g, k, MOMENT_ORDER_CAP, MOMENT_VERTEX_CAP)?;
    let mut walks = vec![BigInt::zero(); g.n];
    walks[g.root] = BigInt::from(1);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        walks = step(&g.adj, &walks, None);
        out.push(Rational::from_integer(walks[g.root].clone()));
    }
    MomentSequence::new(out)
}

/// Closed walks at the root whose interior avoids the root, counted on the
/// root-deleted graph.
pub fn boolean_cumulants_by_walks(g: &RootedGraph, k: usize) -> Result<CumulantSequence> {
    check_caps(g, k, IRREDUCIBLE_ORDER_CAP, IRREDUCIBLE_VERTEX_CAP)?;
    let nbrs = &g.adj[g.root];
    let mut b = vec![BigInt::zero(); k];
    // walks[v] = number of root-avoiding walks of the current length from some
    // root neighbour to v; summed over all starting neighbours at once.
    let mut walks = vec![BigInt::zero(); g.n];
    for &u in nbrs {
        walks[u] += 1;
    }
    for len in 2..=k {
        b[len - 1] = nbrs.iter().map(|&v| walks[v].clone()).sum();
        if len < k {
            walks = step(&g.adj, &walks, Some(g.root));
        }
    }
    CumulantSequence::new(
        CumulantKind::Boolean,
        b.into_iter().map(Rational::from_integer).collect(),
    )
}

/// One application of the adjacency matrix, optionally with a vertex removed.
fn step(adj: &[Vec<usize>], x: &[BigInt], skip: Option<usize>) -> Vec<BigInt> {
    let mut y = vec![BigInt::zero(); x.len()];
    for (u, nbrs) in adj.iter().enumerate() {
        if Some(u) == skip || x[u].is_zero() {
            continue;
        }
        for &v in nbrs {
            if Some(v) != skip {
                y[v] += &x[u];
            }
        }
    }
    y
}
