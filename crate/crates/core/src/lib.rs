//! Enumeration of R(4,4;3)-good 3-uniform hypergraphs.
//!
//! A hypergraph is *good* when every 4-subset of its points spans 1, 2 or 3
//! edges; equivalently, colouring its edges with one colour and the other
//! triples with a second colour leaves no monochromatic 4-set.

pub mod canonical;
pub mod catalogue;
pub mod error;
pub mod extension;
pub mod hypergraph;
pub mod interval;
pub mod probes;

pub use error::{Error, Result};
pub use hypergraph::{triple_rank, triple_unrank, DegreeProfile, Hypergraph, Point, TripleRank};
