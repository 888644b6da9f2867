//! dotline — an embedded, in-memory property-graph engine.
//!
//! The core model is a directed, labeled, attributed multigraph: loops and
//! parallel edges are allowed, every edge carries exactly one label, and
//! both vertices and edges carry ordered key/value property maps
//! ([`graph`]). On top of that sit:
//!
//! - [`views`] — lossy morphisms onto simpler graph types (simple,
//!   weighted, semantic, RDF-shaped, hypergraph encoding);
//! - [`index`] — a property index stored *inside* the graph as ordinary
//!   vertices and edges, giving logarithmic lookups that survive a
//!   save/load round trip;
//! - [`pathlang`] — an XPath-flavored traversal language with property
//!   predicates and `g:assign`/`g:except` variables, evaluated with bag
//!   (multiset) semantics;
//! - [`derive`] — interpretation of traversal paths as virtual edges,
//!   materialization of those edges, and classical algorithms (shortest
//!   path, degree ranking) over the derived graph;
//! - [`io`] — a canonical JSON file format where save∘load is the
//!   identity, byte for byte.
//!
//! Graphs are single-writer/multi-reader: `&mut` methods mutate, everything
//! else is a plain read and safe to share.

pub mod derive;
pub mod graph;
pub mod index;
pub mod io;
pub mod pathlang;
pub mod value;
pub mod views;

/// Reserved property key marking structural vertices (`kind=index` for
/// index trees, `kind=hyperedge` for hyperedge hubs). Indexing it is
/// rejected so structural data can always be told apart from domain data.
pub const KIND_KEY: &str = "kind";

pub use graph::{
    Edge, EdgeId, ElementId, GraphError, PropertyGraph, PropertyMap, Vertex, VertexId,
};
pub use value::{PropertyValue, ValueTag};
