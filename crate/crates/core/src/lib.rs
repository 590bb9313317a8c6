//! Edge-connectivity matrices of weighted graphs and their spectra.
//!
//! The central object is the symmetric matrix whose (v, w) entry is the
//! minimum weight of an edge cut separating v from w. This crate computes
//! such matrices (directly and through flow-equivalent trees), decides
//! which symmetric matrices arise this way, and analyzes their spectral
//! structure: positive-semidefinite shifts, the smallest eigenvalue,
//! energy bounds, equitable quotient decompositions, and the analogous
//! theory for ultrametric distance matrices. A search harness sweeps all
//! small graphs to verify the implemented theorems in bulk and to hunt
//! for counterexamples to the open vertex-connectivity conjectures.

pub mod connmat;
pub mod graph;
pub mod matrix;
pub mod matrix_props;
pub mod maxflow;
pub mod quotient;
pub mod search;
pub mod spectra;
pub mod tol;
pub mod ultrametric;

pub use connmat::FlowTree;
pub use graph::WeightedGraph;
pub use matrix::SymMatrix;
pub use tol::Tol;

/// Vertex ids are dense indices in `[0, n)`.
pub type VertexId = usize;
