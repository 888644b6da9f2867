//! Morphisms from the property graph to other graph types: abandon or add
//! bits and pieces to get a simple graph, a weighted graph, a semantic
//! graph, an RDF-shape report, or a hypergraph encoding.
//!
//! Views are detached snapshots: constructing one never mutates the source
//! graph, and a view stays valid (as data) if the source changes later. The
//! hyperedge codec is the exception by design; it writes hub vertices into
//! the graph.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{EdgeId, ElementId, GraphError, PropertyGraph, VertexId};
use crate::value::{PropertyValue, ValueTag};
use crate::KIND_KEY;

/// `kind` value marking hub vertices created by [`encode_hyperedge`].
pub const KIND_HYPEREDGE: &str = "hyperedge";
/// Label of the hub-to-member edges of an encoded hyperedge.
pub const MEMBER_LABEL: &str = "member";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ViewError {
    #[error("edge \"{edge}\" has no \"{key}\" property and no default weight was given")]
    MissingWeight { edge: EdgeId, key: String },
    #[error("edge \"{edge}\" has a {tag} \"{key}\" property; weights must be int or float")]
    NonNumericWeight {
        edge: EdgeId,
        key: String,
        tag: ValueTag,
    },
    #[error("hyperedge member set must be non-empty")]
    EmptyMemberSet,
    #[error("vertex \"{0}\" is not a hyperedge hub")]
    NotAHyperedge(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Undirected loop-free view: direction dropped, loops removed, parallel
/// and antiparallel edges collapsed to one edge per unordered vertex pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraphView {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl SimpleGraphView {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    /// Unordered pairs, normalized so the lexicographically smaller id
    /// comes first.
    pub fn edges(&self) -> impl Iterator<Item = &(VertexId, VertexId)> {
        self.edges.iter()
    }

    pub fn contains_edge(&self, a: &VertexId, b: &VertexId) -> bool {
        self.edges.contains(&normalize_pair(a, b))
    }
}

fn normalize_pair(a: &VertexId, b: &VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

pub fn to_simple(g: &PropertyGraph) -> SimpleGraphView {
    let vertices = g.vertex_ids().cloned().collect();
    let edges = g
        .edges()
        .filter(|e| !e.is_loop())
        .map(|e| normalize_pair(e.tail(), e.head()))
        .collect();
    SimpleGraphView { vertices, edges }
}

/// One weighted entry per source edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEdge {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: f64,
}

/// Directed weighted view; entry order follows edge-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraphView {
    entries: Vec<WeightedEdge>,
}

impl WeightedGraphView {
    pub fn entries(&self) -> &[WeightedEdge] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }
}

/// Reads each edge's `weight_key` property as its weight (ints widen to
/// float), falling back to `default` when the property is absent.
pub fn to_weighted(
    g: &PropertyGraph,
    weight_key: &str,
    default: Option<f64>,
) -> Result<WeightedGraphView, ViewError> {
    let mut entries = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let weight = match e.property(weight_key) {
            Some(value) => value
                .as_weight()
                .ok_or_else(|| ViewError::NonNumericWeight {
                    edge: e.id().clone(),
                    key: weight_key.to_owned(),
                    tag: value.tag(),
                })?,
            None => default.ok_or_else(|| ViewError::MissingWeight {
                edge: e.id().clone(),
                key: weight_key.to_owned(),
            })?,
        };
        entries.push(WeightedEdge {
            edge: e.id().clone(),
            tail: e.tail().clone(),
            head: e.head().clone(),
            weight,
        });
    }
    Ok(WeightedGraphView { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticEdge {
    pub id: EdgeId,
    pub label: String,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Structure-only view: ids, labels, and endpoints, with every property map
/// dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticGraphView {
    vertices: Vec<VertexId>,
    edges: Vec<SemanticEdge>,
}

impl SemanticGraphView {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[SemanticEdge] {
        &self.edges
    }
}

pub fn to_semantic(g: &PropertyGraph) -> SemanticGraphView {
    SemanticGraphView {
        vertices: g.vertex_ids().cloned().collect(),
        edges: g
            .edges()
            .map(|e| SemanticEdge {
                id: e.id().clone(),
                label: e.label().to_owned(),
                tail: e.tail().clone(),
                head: e.head().clone(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RdfReason {
    /// Vertex has no `name` property to act as its label.
    MissingName,
    /// Vertex `name` property is not text.
    NonTextName,
    /// The label is not an absolute URI.
    NotAUri,
}

impl std::fmt::Display for RdfReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RdfReason::MissingName => f.write_str("no name property"),
            RdfReason::NonTextName => f.write_str("name property is not text"),
            RdfReason::NotAUri => f.write_str("label is not an absolute URI"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfViolation {
    pub element: ElementId,
    /// The offending label text, when there was one to inspect.
    pub label: Option<String>,
    pub reason: RdfReason,
}

/// Result of [`check_rdf_shaped`]: every element whose label is not an
/// absolute URI, vertices first, each group in id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdfReport {
    pub violations: Vec<RdfViolation>,
}

impl RdfReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Syntactic absolute-URI test: a valid scheme, a colon, and a non-empty
/// remainder of URI characters. No network, no registry.
pub fn is_absolute_uri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let rest = &s[colon + 1..];
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok && !rest.is_empty() && rest.chars().all(is_uri_char)
}

fn is_uri_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || matches!(
            c,
            '-' | '.'
                | '_'
                | '~'
                | ':'
                | '/'
                | '?'
                | '#'
                | '['
                | ']'
                | '@'
                | '!'
                | '$'
                | '&'
                | '\''
                | '('
                | ')'
                | '*'
                | '+'
                | ','
                | ';'
                | '='
                | '%'
        )
}

/// Checks whether the graph is RDF-shaped: every vertex labeled (via its
/// `name` property) and every edge labeled by an absolute URI. The graph is
/// not modified.
pub fn check_rdf_shaped(g: &PropertyGraph) -> RdfReport {
    let mut violations = Vec::new();
    for v in g.vertices() {
        let violation = match v.property("name") {
            None => Some((None, RdfReason::MissingName)),
            Some(value) => match value.as_text() {
                None => Some((None, RdfReason::NonTextName)),
                Some(text) if !is_absolute_uri(text) => {
                    Some((Some(text.to_owned()), RdfReason::NotAUri))
                }
                Some(_) => None,
            },
        };
        if let Some((label, reason)) = violation {
            violations.push(RdfViolation {
                element: ElementId::Vertex(v.id().clone()),
                label,
                reason,
            });
        }
    }
    for e in g.edges() {
        if !is_absolute_uri(e.label()) {
            violations.push(RdfViolation {
                element: ElementId::Edge(e.id().clone()),
                label: Some(e.label().to_owned()),
                reason: RdfReason::NotAUri,
            });
        }
    }
    RdfReport { violations }
}

/// Models a hyperedge inside the property graph: a hub vertex marked
/// `kind=hyperedge` with one `member`-labeled edge to each member vertex.
/// Returns the hub's id.
pub fn encode_hyperedge(
    g: &mut PropertyGraph,
    members: &BTreeSet<VertexId>,
    label: &str,
) -> Result<VertexId, ViewError> {
    if members.is_empty() {
        return Err(ViewError::EmptyMemberSet);
    }
    for m in members {
        if !g.contains_vertex(m) {
            return Err(GraphError::UnknownVertex(m.clone()).into());
        }
    }
    let mut properties = crate::graph::PropertyMap::new();
    properties.insert(KIND_KEY.to_owned(), PropertyValue::text(KIND_HYPEREDGE));
    properties.insert("label".to_owned(), PropertyValue::text(label));
    let hub = g.add_vertex(properties);
    for m in members {
        g.add_edge(&hub, m, MEMBER_LABEL, crate::graph::PropertyMap::new())?;
    }
    Ok(hub)
}

/// Reads back the member set of a hub created by [`encode_hyperedge`].
pub fn decode_hyperedge(
    g: &PropertyGraph,
    hub: &VertexId,
) -> Result<BTreeSet<VertexId>, ViewError> {
    let vertex = g
        .vertex(hub)
        .ok_or_else(|| GraphError::UnknownVertex(hub.clone()))?;
    let is_hub = vertex
        .property(KIND_KEY)
        .and_then(PropertyValue::as_text)
        .is_some_and(|kind| kind == KIND_HYPEREDGE);
    if !is_hub {
        return Err(ViewError::NotAHyperedge(hub.clone()));
    }
    let mut members = BTreeSet::new();
    for e in g.out_edges(hub, Some(MEMBER_LABEL))? {
        members.insert(g.edge(&e).expect("edge id from adjacency").head().clone());
    }
    Ok(members)
}
