//! Total unimodularity of disjoint hypergraph and mixed-hypergraph incidence
//! matrices, decided by forbidden-structure search and certified by witnesses.
//!
//! A disjoint hypergraph (size-≥4 edges pairwise vertex-disjoint) has a totally
//! unimodular incidence matrix exactly when it contains neither an odd cycle
//! nor an odd tree house as a partial subhypergraph; the same holds for mixed
//! hypergraphs with parity-aware versions of both structures. This crate
//! decides the property, extracts witnesses constructively, checks them
//! independently, and cross-validates everything against determinant oracles.

pub mod detect;
pub mod error;
pub mod extract;
pub mod fixtures;
pub mod gen;
pub mod hypergraph;
pub mod linalg;
pub mod matrix;
pub mod mixed;
pub mod par;
pub mod quasi;

pub use error::{Error, Result};
pub use hypergraph::{
    incidence_matrix, induce, Edge, EdgeId, HyperArc, Hypergraph, Instance, MixedHypergraph, SubSelection, Vertex,
};
pub use matrix::{support_size, IntMatrix};
pub use par::Exec;
