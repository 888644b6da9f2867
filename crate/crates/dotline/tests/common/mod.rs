//! Shared test support: independent oracles (exhaustive path enumeration,
//! linear scan, Floyd–Warshall) and seeded random generators. The oracles
//! deliberately avoid the library's own evaluation and adjacency machinery
//! — successors come from scanning the full edge table, and traversal is
//! recursive path enumeration rather than level-synchronized passes.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dotline::derive::DerivedGraph;
use dotline::graph::{ElementId, PropertyGraph, PropertyMap, VertexId};
use dotline::pathlang::{Env, PathExpr, Predicate, Step, StepKind};
use dotline::value::PropertyValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded(n: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(n)
}

// ---------------------------------------------------------------- oracles

/// Successors by full edge-table scan — no adjacency lists involved.
fn scan_successors(g: &PropertyGraph, kind: StepKind, el: &ElementId) -> Vec<ElementId> {
    match kind {
        StepKind::Root => unreachable!("root never advances"),
        StepKind::OutE | StepKind::InE | StepKind::BothE => {
            let v = el.as_vertex().expect("vertex position");
            let mut out = Vec::new();
            for e in g.edges() {
                if kind != StepKind::InE && e.tail() == v {
                    out.push(ElementId::Edge(e.id().clone()));
                }
                if kind != StepKind::OutE && e.head() == v {
                    out.push(ElementId::Edge(e.id().clone()));
                }
            }
            out
        }
        StepKind::OutV | StepKind::InV | StepKind::BothV => {
            let e = el.as_edge().expect("edge position");
            let edge = g.edge(e).expect("edge exists");
            let mut out = Vec::new();
            if kind != StepKind::InV {
                out.push(ElementId::Vertex(edge.tail().clone()));
            }
            if kind != StepKind::OutV {
                out.push(ElementId::Vertex(edge.head().clone()));
            }
            out
        }
    }
}

/// The predicate property read, re-stated: plain property access, with an
/// edge's label visible as property `label` (shadowing stored data).
fn scan_property(g: &PropertyGraph, el: &ElementId, key: &str) -> Option<PropertyValue> {
    match el {
        ElementId::Vertex(v) => g.vertex(v).expect("vertex exists").property(key).cloned(),
        ElementId::Edge(e) => {
            let edge = g.edge(e).expect("edge exists");
            if key == "label" {
                Some(PropertyValue::text(edge.label()))
            } else {
                edge.property(key).cloned()
            }
        }
    }
}

fn scan_passes(
    g: &PropertyGraph,
    el: &ElementId,
    key: &str,
    want: &PropertyValue,
    negated: bool,
) -> bool {
    match scan_property(g, el, key) {
        None => false,
        Some(found) => (found == *want) != negated,
    }
}

/// A cut inside the expression: element has been moved into step `.0` and
/// filtered by its predicates with index < `.1`.
type Cut = (usize, usize);

/// Depth-first enumeration of every path prefix from `el` (currently at
/// cut `(step, pred)`) up to `target`, collecting the elements that reach
/// the target cut — one occurrence per distinct path.
#[allow(clippy::too_many_arguments)]
fn enumerate_paths(
    g: &PropertyGraph,
    expr: &PathExpr,
    el: ElementId,
    step: usize,
    pred: usize,
    target: Cut,
    except_sets: &BTreeMap<Cut, BTreeSet<ElementId>>,
    out: &mut Vec<ElementId>,
) {
    if (step, pred) == target {
        out.push(el);
        return;
    }
    let predicates = &expr.steps()[step].predicates;
    if pred < predicates.len() {
        let keep = match &predicates[pred] {
            Predicate::PropEq {
                key,
                value,
                negated,
            } => scan_passes(g, &el, key, value, *negated),
            Predicate::Assign { .. } => true, // records, passes through
            Predicate::Except { .. } => !except_sets
                .get(&(step, pred))
                .expect("except sets resolved in expression order")
                .contains(&el),
        };
        if keep {
            enumerate_paths(g, expr, el, step, pred + 1, target, except_sets, out);
        }
        return;
    }
    if step + 1 < expr.steps().len() {
        for next in scan_successors(g, expr.steps()[step + 1].kind, &el) {
            enumerate_paths(g, expr, next, step + 1, 0, target, except_sets, out);
        }
    }
}

fn elements_at(
    g: &PropertyGraph,
    roots: &[VertexId],
    expr: &PathExpr,
    target: Cut,
    except_sets: &BTreeMap<Cut, BTreeSet<ElementId>>,
) -> Vec<ElementId> {
    let mut out = Vec::new();
    for r in roots {
        enumerate_paths(
            g,
            expr,
            ElementId::Vertex(r.clone()),
            0,
            0,
            target,
            except_sets,
            &mut out,
        );
    }
    out
}

/// Exhaustive path-enumeration oracle. Resolves every variable position in
/// expression order — an assign's set is everything reaching its cut, an
/// except snapshots its variable as of its own cut — then enumerates all
/// complete paths. Returns the result multiset and the final environment.
pub fn oracle_evaluate(
    g: &PropertyGraph,
    roots: &[VertexId],
    expr: &PathExpr,
    initial_env: &Env,
) -> (BTreeMap<ElementId, usize>, Env) {
    let mut env: BTreeMap<String, BTreeSet<ElementId>> = initial_env
        .vars()
        .map(|(var, ids)| (var.clone(), ids.clone()))
        .collect();
    let mut except_sets: BTreeMap<Cut, BTreeSet<ElementId>> = BTreeMap::new();
    for (i, step) in expr.steps().iter().enumerate() {
        for (p, predicate) in step.predicates.iter().enumerate() {
            match predicate {
                Predicate::Assign { var } => {
                    let reached = elements_at(g, roots, expr, (i, p), &except_sets);
                    env.entry(var.clone()).or_default().extend(reached);
                }
                Predicate::Except { var } => {
                    except_sets.insert((i, p), env.get(var).cloned().unwrap_or_default());
                }
                Predicate::PropEq { .. } => {}
            }
        }
    }
    let last = expr.steps().len() - 1;
    let finished = elements_at(
        g,
        roots,
        expr,
        (last, expr.steps()[last].predicates.len()),
        &except_sets,
    );
    let mut counts = BTreeMap::new();
    for el in finished {
        *counts.entry(el).or_insert(0usize) += 1;
    }
    let mut final_env = Env::new();
    for (var, ids) in env {
        final_env.bind(var, ids);
    }
    (counts, final_env)
}

/// Linear-scan lookup oracle: every non-index vertex whose `key` equals
/// `value`, one pass, no tree involved.
pub fn scan_lookup(g: &PropertyGraph, key: &str, value: &PropertyValue) -> BTreeSet<VertexId> {
    g.vertices()
        .filter(|v| {
            v.property("kind").and_then(PropertyValue::as_text) != Some("index")
                && v.property(key) == Some(value)
        })
        .map(|v| v.id().clone())
        .collect()
}

/// All-pairs minimum hop counts over the derived edges, by Floyd–Warshall.
/// Only reachable pairs appear in the map; (v, v) is always 0.
pub fn floyd_warshall(d: &DerivedGraph) -> BTreeMap<(VertexId, VertexId), usize> {
    let vs: Vec<&VertexId> = d.vertices().iter().collect();
    let n = vs.len();
    let index: BTreeMap<&VertexId, usize> = vs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    const INF: usize = usize::MAX;
    let mut dist = vec![vec![INF; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in d.pairs().keys() {
        let (i, j) = (index[u], index[v]);
        if i != j {
            dist[i][j] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if dist[k][j] != INF && dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if dist[i][j] != INF {
                out.insert((vs[i].clone(), vs[j].clone()), dist[i][j]);
            }
        }
    }
    out
}

// ------------------------------------------------------------- generators

pub fn random_value(rng: &mut ChaCha8Rng) -> PropertyValue {
    match rng.random_range(0..4) {
        0 => PropertyValue::Int(rng.random_range(0..3)),
        1 => PropertyValue::text(if rng.random_bool(0.5) { "x" } else { "y" }),
        2 => PropertyValue::Bool(rng.random_bool(0.5)),
        _ => PropertyValue::Float([0.5, 1.5, -2.25][rng.random_range(0..3)]),
    }
}

pub fn random_props(rng: &mut ChaCha8Rng, keys: &[&str]) -> PropertyMap {
    let mut m = PropertyMap::new();
    for key in keys {
        if rng.random_bool(0.6) {
            m.insert((*key).to_owned(), random_value(rng));
        }
    }
    m
}

/// Random multigraph: 1..=max_v vertices, 0..=max_e edges with loops and
/// parallels allowed, labels and property keys drawn from the given pools.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_v: usize,
    max_e: usize,
    labels: &[&str],
    keys: &[&str],
) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let n = rng.random_range(1..=max_v);
    let ids: Vec<VertexId> = (0..n)
        .map(|_| g.add_vertex(random_props(rng, keys)))
        .collect();
    for _ in 0..rng.random_range(0..=max_e) {
        let tail = &ids[rng.random_range(0..n)];
        let head = &ids[rng.random_range(0..n)];
        let label = labels[rng.random_range(0..labels.len())];
        g.add_edge(tail, head, label, random_props(rng, keys))
            .expect("endpoints exist");
    }
    g
}

fn random_predicates(
    rng: &mut ChaCha8Rng,
    on_edge: bool,
    labels: &[&str],
    keys: &[&str],
    assigned: &mut Vec<String>,
    allow_vars: bool,
) -> Vec<Predicate> {
    const VAR_POOL: [&str; 2] = ["$x", "$y"];
    let count = [0, 0, 1, 1, 2][rng.random_range(0..5)];
    let mut predicates = Vec::new();
    for _ in 0..count {
        let roll = if allow_vars {
            rng.random_range(0..10)
        } else {
            0
        };
        if roll < 6 || (roll >= 8 && assigned.is_empty()) {
            let (key, value) = if on_edge && rng.random_bool(0.5) {
                (
                    "label".to_owned(),
                    PropertyValue::text(labels[rng.random_range(0..labels.len())]),
                )
            } else {
                (
                    keys[rng.random_range(0..keys.len())].to_owned(),
                    random_value(rng),
                )
            };
            predicates.push(Predicate::PropEq {
                key,
                value,
                negated: rng.random_bool(0.3),
            });
        } else if roll < 8 {
            let var = VAR_POOL[rng.random_range(0..VAR_POOL.len())].to_owned();
            predicates.push(Predicate::Assign { var: var.clone() });
            assigned.push(var); // visible to excepts at later positions
        } else {
            let var = assigned[rng.random_range(0..assigned.len())].clone();
            predicates.push(Predicate::Except { var });
        }
    }
    predicates
}

/// Random well-typed expression of 0..=3 vertex-to-vertex hops whose
/// excepts only reference variables assigned earlier in the expression.
pub fn random_expr(rng: &mut ChaCha8Rng, labels: &[&str], keys: &[&str]) -> PathExpr {
    random_expr_with(rng, labels, keys, true)
}

/// Like [`random_expr`] but with property-equality predicates only — no
/// variables — for laws that only hold without `g:except`.
pub fn random_expr_no_vars(rng: &mut ChaCha8Rng, labels: &[&str], keys: &[&str]) -> PathExpr {
    random_expr_with(rng, labels, keys, false)
}

fn random_expr_with(
    rng: &mut ChaCha8Rng,
    labels: &[&str],
    keys: &[&str],
    allow_vars: bool,
) -> PathExpr {
    let hops = rng.random_range(0..=3);
    let mut steps = vec![Step::bare(StepKind::Root)];
    let mut assigned = Vec::new();
    for _ in 0..hops {
        let edge_kind = StepKind::EDGE_STEPS[rng.random_range(0..3)];
        steps.push(Step::new(
            edge_kind,
            random_predicates(rng, true, labels, keys, &mut assigned, allow_vars),
        ));
        let vertex_kind = StepKind::VERTEX_STEPS[rng.random_range(0..3)];
        steps.push(Step::new(
            vertex_kind,
            random_predicates(rng, false, labels, keys, &mut assigned, allow_vars),
        ));
    }
    PathExpr::new(steps).expect("generator respects expression structure")
}

/// 1..=2 random existing roots (duplicates possible, as the evaluator
/// permits).
pub fn random_roots(rng: &mut ChaCha8Rng, g: &PropertyGraph) -> Vec<VertexId> {
    let ids: Vec<&VertexId> = g.vertex_ids().collect();
    let count = rng.random_range(1..=2);
    (0..count)
        .map(|_| ids[rng.random_range(0..ids.len())].clone())
        .collect()
}
