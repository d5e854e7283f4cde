//! Non-commutative probability invariants for simplicial complexes and point clouds.
//!
//! The crate is organised bottom-up:
//!
//! * [`partitions`] enumerates the lattices of all, non-crossing and interval
//!   partitions and computes their Möbius functions.
//! * [`cumulants`] converts between moments and classical, free, Boolean and
//!   monotone cumulants in exact rational arithmetic.
//! * [`simplicial`] builds abstract simplicial complexes with their boundary,
//!   incidence and adjacency/degree matrices.
//! * [`spectra`] holds the dense Jacobi eigensolver, combinatorial Laplacians,
//!   spectral measures and spectral Betti numbers.
//! * [`snf`] computes Smith normal forms over the integers and over GF(2).
//! * [`graphs`] realizes Boolean convolution through star products of rooted graphs.
//! * [`tda`] constructs Čech and Vietoris-Rips filtrations, Betti curves and
//!   persistence pairs.
//! * [`randmat`] samples Ginibre, Wigner and Haar matrices and the repulsive
//!   point clouds derived from their eigenvalues.

pub mod cumulants;
pub mod error;
pub mod graphs;
pub mod matrix;
pub mod partitions;
pub mod randmat;
pub mod simplicial;
pub mod snf;
pub mod spectra;
pub mod tda;

pub use error::{Error, Result};

/// Exact rational scalar used by every combinatorial routine.
pub type Rational = num_rational::BigRational;
