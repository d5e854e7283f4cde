#![allow(dead_code)]

use nctda::simplicial::SimplicialComplex;
use proptest::prelude::*;

/// Random complex on at most `max_v` vertices, given by up to six facets
/// encoded as vertex bitmasks.
pub fn complex(max_v: u32) -> impl Strategy<Value = SimplicialComplex> {
    proptest::collection::vec(1u32..(1 << max_v), 1..=6).prop_map(|masks| {
        let facets: Vec<Vec<usize>> = masks
            .iter()
            .map(|&m| (0..32).filter(|b| m >> b & 1 == 1).map(|b| b as usize + 1).collect())
            .collect();
        SimplicialComplex::from_facets(&facets).unwrap()
    })
}

pub fn tetrahedron_boundary() -> SimplicialComplex {
    SimplicialComplex::from_facets(&[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]).unwrap()
}

pub fn rp2() -> SimplicialComplex {
    SimplicialComplex::from_facets(&[
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 2, 6],
        [2, 3, 5],
        [2, 4, 5],
        [2, 4, 6],
        [3, 4, 6],
        [3, 5, 6],
    ])
    .unwrap()
}
