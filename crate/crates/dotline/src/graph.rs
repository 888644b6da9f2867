//! The directed, labeled, attributed multi-graph and its adjacency
//! primitives.
//!
//! Loops (tail == head) and parallel edges are permitted; restriction to
//! stricter graph types happens in [`crate::views`]. Mutation follows a
//! single-writer / multiple-reader contract: the graph has no interior
//! locking, callers serialize writes.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::value::PropertyValue;

/// Property map carried by every vertex and edge. A `BTreeMap` keeps keys
/// unique and sorted, which the canonical file format relies on.
pub type PropertyMap = BTreeMap<String, PropertyValue>;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_type! {
    /// Opaque vertex identifier, unique among vertices for the lifetime of a
    /// graph and never reused after deletion within one session.
    VertexId
}

id_type! {
    /// Opaque edge identifier, unique among edges for the lifetime of a
    /// graph and never reused after deletion within one session.
    EdgeId
}

/// Either a vertex id or an edge id; query results and variable bindings
/// hold these.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementId {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl ElementId {
    pub fn id_str(&self) -> &str {
        match self {
            ElementId::Vertex(v) => v.as_str(),
            ElementId::Edge(e) => e.as_str(),
        }
    }

    pub fn as_vertex(&self) -> Option<&VertexId> {
        match self {
            ElementId::Vertex(v) => Some(v),
            ElementId::Edge(_) => None,
        }
    }

    pub fn as_edge(&self) -> Option<&EdgeId> {
        match self {
            ElementId::Edge(e) => Some(e),
            ElementId::Vertex(_) => None,
        }
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id_str())
    }
}

impl From<VertexId> for ElementId {
    fn from(v: VertexId) -> Self {
        ElementId::Vertex(v)
    }
}

impl From<EdgeId> for ElementId {
    fn from(e: EdgeId) -> Self {
        ElementId::Edge(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    id: VertexId,
    properties: PropertyMap,
}

impl Vertex {
    pub fn id(&self) -> &VertexId {
        &self.id
    }

    pub fn properties(&self) -> &PropertyMap {
        &self.properties
    }

    pub fn property(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    id: EdgeId,
    label: String,
    tail: VertexId,
    head: VertexId,
    properties: PropertyMap,
}

impl Edge {
    pub fn id(&self) -> &EdgeId {
        &self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The out-vertex the edge leaves from.
    pub fn tail(&self) -> &VertexId {
        &self.tail
    }

    /// The in-vertex the edge arrives at.
    pub fn head(&self) -> &VertexId {
        &self.head
    }

    pub fn properties(&self) -> &PropertyMap {
        &self.properties
    }

    pub fn property(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex \"{0}\"")]
    UnknownVertex(VertexId),
    #[error("unknown edge \"{0}\"")]
    UnknownEdge(EdgeId),
    #[error("edge label must be non-empty")]
    EmptyLabel,
    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),
}

/// Per-vertex incidence lists, kept in insertion order so traversal output
/// is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Adjacency {
    out: Vec<EdgeId>,
    incoming: Vec<EdgeId>,
}

/// The property graph. Element maps are keyed by id (sorted), adjacency
/// lists are insertion-ordered, and the two are kept mutually consistent by
/// every mutation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyGraph {
    vertices: BTreeMap<VertexId, Vertex>,
    edges: BTreeMap<EdgeId, Edge>,
    adjacency: BTreeMap<VertexId, Adjacency>,
    next_id: u64,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh_id(&mut self) -> String {
        loop {
            let candidate = self.next_id.to_string();
            self.next_id += 1;
            let taken = self.vertices.contains_key(&VertexId::new(&candidate))
                || self.edges.contains_key(&EdgeId::new(&candidate));
            if !taken {
                return candidate;
            }
        }
    }

    /// Keeps graph-assigned ids clear of explicitly supplied numeric ids.
    fn reserve_numeric(&mut self, id: &str) {
        if let Ok(n) = id.parse::<u64>() {
            if n >= self.next_id {
                self.next_id = n.saturating_add(1);
            }
        }
    }

    pub fn add_vertex(&mut self, properties: PropertyMap) -> VertexId {
        let id = VertexId::new(self.fresh_id());
        self.vertices.insert(
            id.clone(),
            Vertex {
                id: id.clone(),
                properties,
            },
        );
        self.adjacency.insert(id.clone(), Adjacency::default());
        id
    }

    /// Inserts a vertex under a caller-chosen id (used by the file loader).
    pub fn add_vertex_with_id(
        &mut self,
        id: VertexId,
        properties: PropertyMap,
    ) -> Result<VertexId, GraphError> {
        if self.vertices.contains_key(&id) {
            return Err(GraphError::DuplicateId(id.as_str().to_owned()));
        }
        self.reserve_numeric(id.as_str());
        self.vertices.insert(
            id.clone(),
            Vertex {
                id: id.clone(),
                properties,
            },
        );
        self.adjacency.insert(id.clone(), Adjacency::default());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        tail: &VertexId,
        head: &VertexId,
        label: impl Into<String>,
        properties: PropertyMap,
    ) -> Result<EdgeId, GraphError> {
        let id = EdgeId::new(self.fresh_id());
        self.insert_edge(id, tail, head, label.into(), properties)
    }

    pub fn add_edge_with_id(
        &mut self,
        id: EdgeId,
        tail: &VertexId,
        head: &VertexId,
        label: impl Into<String>,
        properties: PropertyMap,
    ) -> Result<EdgeId, GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateId(id.as_str().to_owned()));
        }
        self.reserve_numeric(id.as_str());
        self.insert_edge(id, tail, head, label.into(), properties)
    }

    fn insert_edge(
        &mut self,
        id: EdgeId,
        tail: &VertexId,
        head: &VertexId,
        label: String,
        properties: PropertyMap,
    ) -> Result<EdgeId, GraphError> {
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        if !self.vertices.contains_key(tail) {
            return Err(GraphError::UnknownVertex(tail.clone()));
        }
        if !self.vertices.contains_key(head) {
            return Err(GraphError::UnknownVertex(head.clone()));
        }
        self.edges.insert(
            id.clone(),
            Edge {
                id: id.clone(),
                label,
                tail: tail.clone(),
                head: head.clone(),
                properties,
            },
        );
        self.adjacency
            .get_mut(tail)
            .expect("adjacency entry exists for every vertex")
            .out
            .push(id.clone());
        self.adjacency
            .get_mut(head)
            .expect("adjacency entry exists for every vertex")
            .incoming
            .push(id.clone());
        Ok(id)
    }

    pub fn vertex(&self, id: &VertexId) -> Option<&Vertex> {
        self.vertices.get(id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn contains_vertex(&self, id: &VertexId) -> bool {
        self.vertices.contains_key(id)
    }

    pub fn contains_edge(&self, id: &EdgeId) -> bool {
        self.edges.contains_key(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices in id order.
    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    /// Edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.keys()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.keys()
    }

    /// Edges leaving `v`, in insertion order, optionally narrowed to one
    /// label. A loop at `v` shows up here and in [`Self::in_edges`].
    pub fn out_edges(
        &self,
        v: &VertexId,
        label_filter: Option<&str>,
    ) -> Result<Vec<EdgeId>, GraphError> {
        let adj = self
            .adjacency
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
        Ok(self.filter_by_label(&adj.out, label_filter))
    }

    /// Edges arriving at `v`, in insertion order; mirror of
    /// [`Self::out_edges`].
    pub fn in_edges(
        &self,
        v: &VertexId,
        label_filter: Option<&str>,
    ) -> Result<Vec<EdgeId>, GraphError> {
        let adj = self
            .adjacency
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
        Ok(self.filter_by_label(&adj.incoming, label_filter))
    }

    fn filter_by_label(&self, edges: &[EdgeId], label_filter: Option<&str>) -> Vec<EdgeId> {
        match label_filter {
            None => edges.to_vec(),
            Some(label) => edges
                .iter()
                .filter(|id| self.edges[*id].label == label)
                .cloned()
                .collect(),
        }
    }

    pub fn out_degree(&self, v: &VertexId) -> Result<usize, GraphError> {
        Ok(self.out_edges(v, None)?.len())
    }

    pub fn in_degree(&self, v: &VertexId) -> Result<usize, GraphError> {
        Ok(self.in_edges(v, None)?.len())
    }

    /// Removes a vertex and every incident edge (a loop counts once).
    pub fn remove_vertex(&mut self, v: &VertexId) -> Result<(), GraphError> {
        let adj = self
            .adjacency
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
        let mut incident: Vec<EdgeId> =
            adj.out.iter().chain(adj.incoming.iter()).cloned().collect();
        incident.sort();
        incident.dedup();
        for e in incident {
            self.remove_edge(&e)?;
        }
        self.adjacency.remove(v);
        self.vertices.remove(v);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: &EdgeId) -> Result<(), GraphError> {
        let edge = self
            .edges
            .remove(e)
            .ok_or_else(|| GraphError::UnknownEdge(e.clone()))?;
        if let Some(adj) = self.adjacency.get_mut(&edge.tail) {
            adj.out.retain(|id| id != e);
        }
        if let Some(adj) = self.adjacency.get_mut(&edge.head) {
            adj.incoming.retain(|id| id != e);
        }
        Ok(())
    }

    pub fn get_property(
        &self,
        element: &ElementId,
        key: &str,
    ) -> Result<Option<&PropertyValue>, GraphError> {
        match element {
            ElementId::Vertex(v) => self
                .vertices
                .get(v)
                .map(|vx| vx.properties.get(key))
                .ok_or_else(|| GraphError::UnknownVertex(v.clone())),
            ElementId::Edge(e) => self
                .edges
                .get(e)
                .map(|ed| ed.properties.get(key))
                .ok_or_else(|| GraphError::UnknownEdge(e.clone())),
        }
    }

    /// Sets a property, overwriting any previous value (last write wins).
    pub fn set_property(
        &mut self,
        element: &ElementId,
        key: impl Into<String>,
        value: PropertyValue,
    ) -> Result<(), GraphError> {
        self.properties_mut(element)?.insert(key.into(), value);
        Ok(())
    }

    /// Drops a property; returns the previous value if one was set.
    pub fn remove_property(
        &mut self,
        element: &ElementId,
        key: &str,
    ) -> Result<Option<PropertyValue>, GraphError> {
        Ok(self.properties_mut(element)?.remove(key))
    }

    fn properties_mut(&mut self, element: &ElementId) -> Result<&mut PropertyMap, GraphError> {
        match element {
            ElementId::Vertex(v) => self
                .vertices
                .get_mut(v)
                .map(|vx| &mut vx.properties)
                .ok_or_else(|| GraphError::UnknownVertex(v.clone())),
            ElementId::Edge(e) => self
                .edges
                .get_mut(e)
                .map(|ed| &mut ed.properties)
                .ok_or_else(|| GraphError::UnknownEdge(e.clone())),
        }
    }
}

/// Shorthand for building a [`PropertyMap`] in tests and fixtures.
#[macro_export]
macro_rules! props {
    () => { $crate::graph::PropertyMap::new() };
    ($($key:expr => $value:expr),+ $(,)?) => {{
        let mut map = $crate::graph::PropertyMap::new();
        $(map.insert($key.to_string(), $crate::value::PropertyValue::from($value));)+
        map
    }};
}
