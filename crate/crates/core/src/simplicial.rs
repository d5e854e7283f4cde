//! Abstract simplicial complexes and their boundary, incidence and
//! adjacency/degree matrices over the chain grading `(n_0, ..., n_d)`.
//!
//! Vertices are stored 0-based internally and printed 1-based. Faces are
//! strictly increasing vertex tuples, sorted lexicographically within each
//! dimension; graded matrices index rows and columns by dimension first, then
//! by that order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Vertex tuple of a face, 0-based and strictly increasing.
pub type Face = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    faces: Vec<Vec<Face>>,
}

impl SimplicialComplex {
    /// Downward closure of the given facets.
    ///
    /// Vertex labels are replaced by their rank among all labels (so labels
    /// `1..n_0` are kept as they are); this preserves the relative vertex order
    /// that orients every face.
    pub fn from_facets<F: AsRef<[usize]>>(facets: &[F]) -> Result<Self> {
        if facets.is_empty() {
            return Err(Error::domain("a complex needs at least one facet"));
        }
        let mut labels = BTreeSet::new();
        for f in facets {
            let f = f.as_ref();
            if f.is_empty() {
                return Err(Error::domain("facets must be nonempty"));
            }
            labels.extend(f.iter().copied());
        }
        let labels: Vec<usize> = labels.into_iter().collect();
        let rank = |v: usize| labels.binary_search(&v).expect("label collected") as u32;

        let mut by_dim: Vec<BTreeSet<Face>> = Vec::new();
        for f in facets {
            let mut face: Face = f.as_ref().iter().map(|&v| rank(v)).collect();
            face.sort_unstable();
            if face.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::domain(format!(
                    "facet {:?} repeats a vertex",
                    f.as_ref()
                )));
            }
            let dim = face.len() - 1;
            if by_dim.len() <= dim {
                by_dim.resize_with(dim + 1, BTreeSet::new);
            }
            by_dim[dim].insert(face);
        }
        // Close downwards one dimension at a time.
        for dim in (1..by_dim.len()).rev() {
            let (lower, upper) = by_dim.split_at_mut(dim);
            let below = &mut lower[dim - 1];
            for face in upper[0].iter() {
                for skip in 0..face.len() {
                    let mut sub = face.clone();
                    sub.remove(skip);
                    below.insert(sub);
                }
            }
        }
        Ok(SimplicialComplex {
            faces: by_dim.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Wraps already-closed, sorted face lists, as produced by clique expansion.
    pub(crate) fn from_graded_faces_unchecked(faces: Vec<Vec<Face>>) -> Self {
        debug_assert!(!faces.is_empty() && !faces[0].is_empty());
        debug_assert!(faces.iter().all(|fs| fs.windows(2).all(|w| w[0] < w[1])));
        let mut faces = faces;
        while faces.len() > 1 && faces.last().is_some_and(Vec::is_empty) {
            faces.pop();
        }
        SimplicialComplex { faces }
    }

    pub fn dim(&self) -> usize {
        self.faces.len() - 1
    }

    /// Face counts `(n_0, ..., n_d)`.
    pub fn counts(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    pub fn num_vertices(&self) -> usize {
        self.faces[0].len()
    }

    pub fn faces(&self, r: usize) -> &[Face] {
        self.faces.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, face: &[u32]) -> Option<usize> {
        let r = face.len().checked_sub(1)?;
        self.faces.get(r)?.binary_search_by(|f| f.as_slice().cmp(face)).ok()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(i, &n)| if i % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Faces that are not contained in any other face, by ascending dimension.
    pub fn facets(&self) -> Vec<Face> {
        let mut covered: Vec<Vec<bool>> = self.faces.iter().map(|fs| vec![false; fs.len()]).collect();
        for r in 1..self.faces.len() {
            for face in &self.faces[r] {
                for skip in 0..face.len() {
                    let mut sub = face.clone();
                    sub.remove(skip);
                    let idx = self.index_of(&sub).expect("complex is closed");
                    covered[r - 1][idx] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (r, fs) in self.faces.iter().enumerate() {
            for (i, f) in fs.iter().enumerate() {
                if !covered[r][i] {
                    out.push(f.clone());
                }
            }
        }
        out
    }

    /// Signed sparse columns of `∂_r`: for each r-face, `(row, sign)` pairs.
    ///
    /// Removing the vertex at position `k` of an r-face contributes `(-1)^(r-k)`.
    /// This is the alternating sum with the sign flipped on odd dimensions, the
    /// orientation for which the tetrahedron's `∂_1` has `+1` on the smaller vertex.
    pub fn boundary_columns(&self, r: usize) -> Result<Vec<Vec<(u32, i8)>>> {
        if r == 0 || r > self.dim() {
            return Err(Error::domain(format!(
                "boundary operator ∂_{r} needs 1 <= r <= d = {}",
                self.dim()
            )));
        }
        let mut sub = Vec::with_capacity(r);
        Ok(self.faces[r]
            .iter()
            .map(|face| {
                let mut col: Vec<(u32, i8)> = (0..=r)
                    .map(|k| {
                        sub.clear();
                        sub.extend(face.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v));
                        let row = self.index_of(&sub).expect("complex is closed") as u32;
                        let sign = if (r - k) % 2 == 0 { 1 } else { -1 };
                        (row, sign)
                    })
                    .collect();
                col.sort_unstable_by_key(|&(row, _)| row);
                col
            })
            .collect())
    }

    /// Complex file format: one facet per line, 1-based vertex labels separated
    /// by spaces, facets by ascending dimension then lexicographically.
    pub fn to_facet_text(&self) -> String {
        let mut out = String::new();
        for facet in self.facets() {
            let line: Vec<String> = facet.iter().map(|v| (v + 1).to_string()).collect();
            writeln!(out, "{}", line.join(" ")).expect("writing to a String");
        }
        out
    }

    /// Parses the complex file format; `#` starts a comment.
    pub fn parse_facet_text(text: &str) -> Result<Self> {
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let facet = line
                .split_whitespace()
                .map(|tok| match tok.parse::<usize>() {
                    Ok(v) if v > 0 => Ok(v),
                    _ => Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected a positive vertex label, found '{tok}'"),
                    }),
                })
                .collect::<Result<Vec<usize>>>()?;
            facets.push(facet);
        }
        if facets.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no facets found".into(),
            });
        }
        SimplicialComplex::from_facets(&facets).map_err(|e| match e {
            Error::Domain(msg) => Error::Parse { line: 0, msg },
            other => other,
        })
    }
}

/// Square matrix over the chain grading with block access `P_i M P_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix<T> {
    grading: Vec<usize>,
    matrix: Matrix<T>,
}

impl<T: Clone + num_traits::Zero> GradedMatrix<T> {
    pub fn zeros(grading: Vec<usize>) -> Self {
        let n = grading.iter().sum();
        GradedMatrix {
            grading,
            matrix: Matrix::zeros(n, n),
        }
    }

    pub fn grading(&self) -> &[usize] {
        &self.grading
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Row/column offset of grade `i`.
    pub fn offset(&self, i: usize) -> usize {
        self.grading[..i].iter().sum()
    }

    /// The block with rows of grade `i` and columns of grade `j`.
    pub fn block(&self, i: usize, j: usize) -> Matrix<T> {
        let (r0, c0) = (self.offset(i), self.offset(j));
        self.matrix
            .submatrix(r0, r0 + self.grading[i], c0, c0 + self.grading[j])
    }

    pub fn set_block(&mut self, i: usize, j: usize, block: &Matrix<T>) {
        assert_eq!(block.rows(), self.grading[i]);
        assert_eq!(block.cols(), self.grading[j]);
        let (r0, c0) = (self.offset(i), self.offset(j));
        self.matrix.set_block(r0, c0, block);
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> GradedMatrix<U> {
        GradedMatrix {
            grading: self.grading.clone(),
            matrix: self.matrix.map(f),
        }
    }
}

impl GradedMatrix<i64> {
    pub fn matmul(&self, rhs: &GradedMatrix<i64>) -> GradedMatrix<i64> {
        assert_eq!(self.grading, rhs.grading);
        GradedMatrix {
            grading: self.grading.clone(),
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }

    pub fn transpose(&self) -> GradedMatrix<i64> {
        GradedMatrix {
            grading: self.grading.clone(),
            matrix: self.matrix.transpose(),
        }
    }
}

/// Dense `∂_r` as an `n_{r-1} x n_r` integer matrix.
pub fn boundary_operator(x: &SimplicialComplex, r: usize) -> Result<Matrix<i64>> {
    let cols = x.boundary_columns(r)?;
    let mut m = Matrix::zeros(x.faces(r - 1).len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &(row, sign) in col {
            m[(row as usize, j)] = sign as i64;
        }
    }
    Ok(m)
}

/// The boundary matrix `J`, with `∂_r` in block `(r-1, r)`.
pub fn boundary_matrix(x: &SimplicialComplex) -> GradedMatrix<i64> {
    let mut j = GradedMatrix::zeros(x.counts());
    for r in 1..=x.dim() {
        let d = boundary_operator(x, r).expect("1 <= r <= d");
        j.set_block(r - 1, r, &d);
    }
    j
}

/// Unsigned incidence matrix `I = |J|`.
pub fn incidence_matrix(x: &SimplicialComplex) -> GradedMatrix<i64> {
    boundary_matrix(x).map(|v| v.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Adjacency through common cofaces of dimension `i + 1`.
    Up,
    /// Adjacency through common faces of dimension `i - 1`.
    Down,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyDegree {
    /// Diagonal degree matrix Λ.
    pub degree: Matrix<i64>,
    /// Off-diagonal part A.
    pub adjacency: Matrix<i64>,
}

/// Splits the grade-`i` block of `I I*` (up) or `I* I` (down) into its
/// diagonal and off-diagonal parts.
pub fn adjacency_degree(x: &SimplicialComplex, i: usize, direction: Direction) -> Result<AdjacencyDegree> {
    let inc = incidence_matrix(x);
    let product = match direction {
        Direction::Up => {
            if i >= x.dim() {
                return Err(Error::domain(format!(
                    "grade {i} has no cofaces in a complex of dimension {}",
                    x.dim()
                )));
            }
            let b = inc.block(i, i + 1);
            b.matmul(&b.transpose())
        }
        Direction::Down => {
            if i == 0 || i > x.dim() {
                return Err(Error::domain(format!("grade {i} has no faces below it")));
            }
            let b = inc.block(i - 1, i);
            b.transpose().matmul(&b)
        }
    };
    let n = product.rows();
    let degree = Matrix::from_fn(n, n, |r, c| if r == c { product[(r, c)] } else { 0 });
    let adjacency = Matrix::from_fn(n, n, |r, c| if r == c { 0 } else { product[(r, c)] });
    Ok(AdjacencyDegree { degree, adjacency })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap()
    }

    #[test]
    fn facets_examples() {
        assert_eq!(tetrahedron().counts(), vec![4, 6, 4]);
        assert_eq!(SimplicialComplex::from_facets(&[[1]]).unwrap().counts(), vec![1]);
        let circle = SimplicialComplex::from_facets(&[[1, 2], [2, 3], [1, 3]]).unwrap();
        assert_eq!(circle.counts(), vec![3, 3]);
        assert!(SimplicialComplex::from_facets::<[usize; 1]>(&[]).is_err());
        assert!(SimplicialComplex::from_facets(&[[1, 1]]).is_err());
    }

    #[test]
    fn labels_are_ranked() {
        let x = SimplicialComplex::from_facets(&[vec![30, 10], vec![20]]).unwrap();
        assert_eq!(x.faces(0), &[vec![0], vec![1], vec![2]]);
        assert_eq!(x.faces(1), &[vec![0, 2]]);
    }

    #[test]
    fn tetrahedron_boundaries_match_printed_matrices() {
        let x = tetrahedron();
        let d1 = boundary_operator(&x, 1).unwrap();
        let expected_d1 = Matrix::from_vec(
            4,
            6,
            vec![
                1, 1, 1, 0, 0, 0, //
                -1, 0, 0, 1, 1, 0, //
                0, -1, 0, -1, 0, 1, //
                0, 0, -1, 0, -1, -1,
            ],
        );
        assert_eq!(d1, expected_d1);
        let d2 = boundary_operator(&x, 2).unwrap();
        let expected_d2 = Matrix::from_vec(
            6,
            4,
            vec![
                1, 1, 0, 0, //
                -1, 0, 1, 0, //
                0, -1, -1, 0, //
                1, 0, 0, 1, //
                0, 1, 0, -1, //
                0, 0, 1, 1,
            ],
        );
        assert_eq!(d2, expected_d2);
        assert!(boundary_operator(&x, 0).is_err());
        assert!(boundary_operator(&x, 3).is_err());
    }

    #[test]
    fn single_edge() {
        let edge = SimplicialComplex::from_facets(&[[1, 2]]).unwrap();
        assert_eq!(boundary_operator(&edge, 1).unwrap(), Matrix::from_vec(2, 1, vec![1, -1]));
        assert_eq!(incidence_matrix(&edge).block(0, 1), Matrix::from_vec(2, 1, vec![1, 1]));
    }

    #[test]
    fn boundary_matrix_squares_to_zero() {
        let j = boundary_matrix(&tetrahedron());
        assert_eq!(j.grading(), &[4, 6, 4]);
        assert!(j.matmul(&j).matrix().is_zero());
        let point = boundary_matrix(&SimplicialComplex::from_facets(&[[1]]).unwrap());
        assert_eq!(point.size(), 1);
        assert!(point.matrix().is_zero());
    }

    #[test]
    fn incidence_does_not_square_to_zero_in_dimension_two() {
        let i = incidence_matrix(&tetrahedron());
        assert!(!i.matmul(&i).matrix().is_zero());
    }

    #[test]
    fn graph_incidence_product() {
        let path = SimplicialComplex::from_facets(&[[1, 2], [2, 3]]).unwrap();
        let up = adjacency_degree(&path, 0, Direction::Up).unwrap();
        assert_eq!(up.degree, Matrix::from_vec(3, 3, vec![1, 0, 0, 0, 2, 0, 0, 0, 1]));
        assert_eq!(up.adjacency, Matrix::from_vec(3, 3, vec![0, 1, 0, 1, 0, 1, 0, 1, 0]));

        // The grade-0 block of I I* is Λ + A.
        let inc = incidence_matrix(&path);
        let grade0 = inc.matmul(&inc.transpose()).block(0, 0);
        let sum = Matrix::from_fn(3, 3, |r, c| up.degree[(r, c)] + up.adjacency[(r, c)]);
        assert_eq!(grade0, sum);

        let down = adjacency_degree(&path, 1, Direction::Down).unwrap();
        assert_eq!(down.degree, Matrix::from_vec(2, 2, vec![2, 0, 0, 2]));
        assert!(adjacency_degree(&path, 1, Direction::Up).is_err());
        assert!(adjacency_degree(&path, 0, Direction::Down).is_err());
    }

    #[test]
    fn triangle_degrees_in_tetrahedron() {
        let down = adjacency_degree(&tetrahedron(), 2, Direction::Down).unwrap();
        assert_eq!(down.degree, Matrix::from_fn(4, 4, |r, c| if r == c { 3 } else { 0 }));
    }

    #[test]
    fn facet_text_round_trip() {
        let x = SimplicialComplex::from_facets(&[vec![1, 2, 3], vec![3, 4], vec![5]]).unwrap();
        let text = x.to_facet_text();
        assert_eq!(text, "5\n3 4\n1 2 3\n");
        let back = SimplicialComplex::parse_facet_text(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.to_facet_text(), text);
    }

    #[test]
    fn facet_text_errors() {
        let err = SimplicialComplex::parse_facet_text("1 2\n# c\n3 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(SimplicialComplex::parse_facet_text("# nothing\n").is_err());
        assert!(SimplicialComplex::parse_facet_text("0 1\n").is_err());
        let with_comments = SimplicialComplex::parse_facet_text("1 2 # edge\n\n2 3\n").unwrap();
        assert_eq!(with_comments.counts(), vec![3, 2]);
    }
}
