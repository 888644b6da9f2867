//! Path expression evaluation over a property graph.
//!
//! Semantics are bag (multiset) semantics: each step maps every element of
//! the current bag to *all* of its successors, so an element's multiplicity
//! in the result equals the number of distinct traversal paths that reach
//! it. Evaluation is level-synchronized — a step is applied to the whole
//! bag before the next step starts — and within a step the predicates run
//! as whole-bag passes, strictly left to right. That makes `g:assign`
//! deterministic: the variable receives exactly the elements that survived
//! the predicates written before it, and a later `g:except` in the same or
//! a following step tests membership against the set as of its own pass.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{ElementId, PropertyGraph, VertexId};
use crate::pathlang::ast::{PathExpr, Predicate, StepKind};
use crate::value::PropertyValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown root vertex \"{0}\"")]
    UnknownRoot(VertexId),
    #[error("variable {0} is not bound in the environment or by an earlier g:assign")]
    UnboundVariable(String),
}

/// Variable environment: each variable (spelled with its `$`) holds a *set*
/// of element ids. `g:assign` unions into it; `g:except` only reads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    vars: BTreeMap<String, BTreeSet<ElementId>>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    /// Binds (or replaces) a variable outright.
    pub fn bind(&mut self, var: impl Into<String>, ids: BTreeSet<ElementId>) {
        self.vars.insert(var.into(), ids);
    }

    pub fn get(&self, var: &str) -> Option<&BTreeSet<ElementId>> {
        self.vars.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.vars.contains_key(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&String, &BTreeSet<ElementId>)> {
        self.vars.iter()
    }

    fn ensure(&mut self, var: &str) {
        self.vars.entry(var.to_owned()).or_default();
    }

    fn extend(&mut self, var: &str, ids: impl IntoIterator<Item = ElementId>) {
        self.vars.entry(var.to_owned()).or_default().extend(ids);
    }
}

/// Ordered multiset of element ids — the value flowing between steps and
/// returned from evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultBag(Vec<ElementId>);

impl ResultBag {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ElementId> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<ElementId> {
        self.0
    }

    /// Multiplicity of every element, for order-insensitive comparison.
    pub fn counts(&self) -> BTreeMap<ElementId, usize> {
        let mut counts = BTreeMap::new();
        for el in &self.0 {
            *counts.entry(el.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// First occurrence of each id retained, order preserved — recovers set
    /// semantics from the bag.
    pub fn unique(&self) -> ResultBag {
        let mut seen = BTreeSet::new();
        ResultBag(
            self.0
                .iter()
                .filter(|el| seen.insert((*el).clone()))
                .cloned()
                .collect(),
        )
    }
}

impl From<Vec<ElementId>> for ResultBag {
    fn from(ids: Vec<ElementId>) -> ResultBag {
        ResultBag(ids)
    }
}

impl IntoIterator for ResultBag {
    type Item = ElementId;
    type IntoIter = std::vec::IntoIter<ElementId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// See [`ResultBag::unique`]; free-function spelling.
pub fn unique(bag: &ResultBag) -> ResultBag {
    bag.unique()
}

/// Reads `key` off an element the way predicates see it: a plain property
/// read, except that edges expose their label as a virtual read-only
/// property `label` (shadowing any stored property of that name).
fn predicate_matches(
    g: &PropertyGraph,
    el: &ElementId,
    key: &str,
    want: &PropertyValue,
    negated: bool,
) -> bool {
    let stored: Option<&PropertyValue> = match el {
        ElementId::Vertex(v) => g.vertex(v).expect("bag ids are live").property(key),
        ElementId::Edge(e) => {
            let edge = g.edge(e).expect("bag ids are live");
            if key == "label" {
                let eq = matches!(want, PropertyValue::Text(s) if s == edge.label());
                return eq != negated;
            }
            edge.property(key)
        }
    };
    match stored {
        // an absent key fails both @k=v and @k!=v
        None => false,
        Some(found) => (found == want) != negated,
    }
}

/// All successors of `el` under an edge or vertex step, in adjacency
/// insertion order. A loop edge is both outgoing and incoming, so `bothE`
/// yields it twice, and `bothV` of a loop yields its vertex twice.
fn advance(g: &PropertyGraph, kind: StepKind, el: &ElementId) -> Vec<ElementId> {
    match kind {
        StepKind::Root => unreachable!("root never advances"),
        StepKind::OutE | StepKind::InE | StepKind::BothE => {
            let v = el.as_vertex().expect("typed expression: vertex position");
            let mut edges = Vec::new();
            if kind != StepKind::InE {
                edges.extend(g.out_edges(v, None).expect("bag ids are live"));
            }
            if kind != StepKind::OutE {
                edges.extend(g.in_edges(v, None).expect("bag ids are live"));
            }
            edges.into_iter().map(ElementId::Edge).collect()
        }
        StepKind::OutV | StepKind::InV | StepKind::BothV => {
            let e = el.as_edge().expect("typed expression: edge position");
            let edge = g.edge(e).expect("bag ids are live");
            match kind {
                StepKind::OutV => vec![ElementId::Vertex(edge.tail().clone())],
                StepKind::InV => vec![ElementId::Vertex(edge.head().clone())],
                _ => vec![
                    ElementId::Vertex(edge.tail().clone()),
                    ElementId::Vertex(edge.head().clone()),
                ],
            }
        }
    }
}

/// Walks `expr` from `roots`, returning the final bag and updating `env`
/// with every `g:assign`. Roots enter the bag with multiplicity 1 each, in
/// the order given (a repeated root is walked repeatedly).
pub fn evaluate(
    g: &PropertyGraph,
    roots: &[VertexId],
    expr: &PathExpr,
    env: &mut Env,
) -> Result<ResultBag, EvalError> {
    for r in roots {
        if !g.contains_vertex(r) {
            return Err(EvalError::UnknownRoot(r.clone()));
        }
    }
    // Every g:except must resolve to something: a binding already in the
    // environment or a g:assign written earlier in the expression. Checked
    // up front so a failure cannot leave the env partially updated.
    let mut assigned: BTreeSet<&str> = BTreeSet::new();
    for step in expr.steps() {
        for p in &step.predicates {
            match p {
                Predicate::Assign { var } => {
                    assigned.insert(var);
                }
                Predicate::Except { var } => {
                    if !env.contains(var) && !assigned.contains(var.as_str()) {
                        return Err(EvalError::UnboundVariable(var.clone()));
                    }
                }
                Predicate::PropEq { .. } => {}
            }
        }
    }
    for var in assigned {
        env.ensure(var);
    }

    let mut bag: Vec<ElementId> = roots.iter().map(|r| ElementId::Vertex(r.clone())).collect();
    for step in &expr.steps()[1..] {
        let mut moved = Vec::new();
        for el in &bag {
            moved.extend(advance(g, step.kind, el));
        }
        bag = moved;
        for p in &step.predicates {
            match p {
                Predicate::PropEq {
                    key,
                    value,
                    negated,
                } => bag.retain(|el| predicate_matches(g, el, key, value, *negated)),
                Predicate::Assign { var } => env.extend(var, bag.iter().cloned()),
                Predicate::Except { var } => {
                    let members = env.get(var).expect("checked or pre-bound above");
                    bag.retain(|el| !members.contains(el));
                }
            }
        }
    }
    Ok(ResultBag(bag))
}
