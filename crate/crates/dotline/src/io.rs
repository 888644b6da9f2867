//! The JSON graph file format: load, save, canonical serialization.
//!
//! A graph file is a single JSON document:
//!
//! ```json
//! { "vertices": [ {"id": "a", "properties": {"name": "josh"}} ],
//!   "edges":    [ {"id": "e0", "label": "attends", "out": "a",
//!                  "in": "b", "properties": {"since": 2007}} ] }
//! ```
//!
//! `out` is the tail (out-vertex) and `in` is the head (in-vertex),
//! mirroring the outV/inV orientation of the query language. Saving always
//! canonicalizes: ids and property keys sorted, floats in shortest
//! round-trip form, so `load` followed by `save` is byte-identity on
//! canonical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, GraphError, PropertyGraph, PropertyMap, VertexId};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),
    #[error("edge \"{edge}\" references missing vertex \"{vertex}\"")]
    DanglingEdge { edge: String, vertex: String },
    #[error("edge \"{0}\" has an empty label")]
    EmptyLabel(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    #[serde(default)]
    properties: PropertyMap,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    label: String,
    #[serde(rename = "out")]
    tail: String,
    #[serde(rename = "in")]
    head: String,
    #[serde(default)]
    properties: PropertyMap,
}

fn parse_error(err: serde_json::Error) -> FileError {
    FileError::Parse {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses a graph from JSON text. Explicit ids are honored; duplicate ids,
/// dangling edge endpoints, and non-scalar property values are rejected.
pub fn from_json(text: &str) -> Result<PropertyGraph, FileError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(parse_error)?;
    let mut g = PropertyGraph::new();
    for v in doc.vertices {
        g.add_vertex_with_id(VertexId::new(&v.id), v.properties)
            .map_err(|_| FileError::DuplicateId(v.id))?;
    }
    for e in doc.edges {
        if e.label.is_empty() {
            return Err(FileError::EmptyLabel(e.id));
        }
        let tail = VertexId::new(&e.tail);
        let head = VertexId::new(&e.head);
        g.add_edge_with_id(EdgeId::new(&e.id), &tail, &head, e.label, e.properties)
            .map_err(|err| match err {
                GraphError::DuplicateId(id) => FileError::DuplicateId(id),
                GraphError::UnknownVertex(v) => FileError::DanglingEdge {
                    edge: e.id.clone(),
                    vertex: v.as_str().to_owned(),
                },
                GraphError::EmptyLabel => FileError::EmptyLabel(e.id.clone()),
                GraphError::UnknownEdge(_) => unreachable!("insertion cannot miss an edge"),
            })?;
    }
    Ok(g)
}

/// Renders the canonical JSON form: vertices and edges sorted by id,
/// property keys sorted, two-space indentation, trailing newline.
pub fn to_json(g: &PropertyGraph) -> String {
    let doc = GraphDoc {
        vertices: g
            .vertices()
            .map(|v| VertexDoc {
                id: v.id().as_str().to_owned(),
                properties: v.properties().clone(),
            })
            .collect(),
        edges: g
            .edges()
            .map(|e| EdgeDoc {
                id: e.id().as_str().to_owned(),
                label: e.label().to_owned(),
                tail: e.tail().as_str().to_owned(),
                head: e.head().as_str().to_owned(),
                properties: e.properties().clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph docs always serialize");
    text.push('\n');
    text
}

pub fn load(path: impl AsRef<Path>) -> Result<PropertyGraph, FileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text)
}

pub fn save(g: &PropertyGraph, path: impl AsRef<Path>) -> Result<(), FileError> {
    let path = path.as_ref();
    fs::write(path, to_json(g)).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}
