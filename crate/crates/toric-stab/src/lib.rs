//! Exact combinatorics of semistability for polarized toric manifolds.
//!
//! A compact toric manifold with a very ample torus-invariant line bundle
//! is encoded by an integral Delzant polytope; its toric divisors are the
//! polytope's facets. This crate decides torus semistability obstructions
//! for such pairs entirely through the polytope: lattice-point counts,
//! normalized volumes and moments, concave piecewise-linear envelopes of
//! lattice data, the obstruction polynomial in the dilation parameter, and
//! the exact margin inequality at a fixed dilation. All arithmetic is
//! arbitrary-precision rational; there is no floating point anywhere in
//! the public API.

// Indexed loops are the clearer idiom in the elimination-style kernels
// this crate is full of.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod rational;

pub mod linalg;

pub mod hull;

pub mod geometry;

pub mod envelope;

pub mod measures;

pub mod poly;

pub mod obstruction;

pub mod lp;

pub mod dd;

pub mod stability;

pub mod futaki;

pub mod io;

pub mod fixtures;

pub mod cli;

pub use error::{Error, Result};
