//! Derived graphs: interpret a path through the graph as a single virtual
//! edge, collect those edges over many roots, and run classical
//! unlabeled-graph algorithms (shortest path, degree ranking) on the
//! result. A derived graph can also be written back into the source graph
//! as real edges ([`materialize`]), turning inferred adjacency into data.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{GraphError, PropertyGraph, PropertyMap, VertexId};
use crate::pathlang::{evaluate, Env, EvalError, PathExpr};
use crate::value::PropertyValue;

/// Property stamped on every materialized edge so derived data stays
/// distinguishable from original data.
pub const DERIVED_PROP: &str = "derived";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeriveError {
    #[error("expression ends at an edge position; derivation needs a vertex-to-vertex path")]
    ExpressionEndsOnEdge,
    #[error("derived edges need a non-empty label")]
    EmptyLabel,
    #[error("label \"{0}\" already appears in the graph; derived edges must be separable")]
    LabelCollision(String),
    #[error("vertex \"{0}\" is not part of the derived graph")]
    UnknownVertex(VertexId),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which vertices to derive from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootSpec {
    /// Every vertex of the source graph, in id order.
    All,
    /// An explicit root list, walked in the order given.
    Ids(Vec<VertexId>),
}

/// An unlabeled directed multigraph derived from a source graph: one edge
/// u→v per traversal path from u to v under the generating expression.
/// Detached from the source — later source mutations do not update it.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedGraph {
    vertices: BTreeSet<VertexId>,
    pairs: BTreeMap<(VertexId, VertexId), usize>,
    expr: PathExpr,
    label: Option<String>,
}

impl DerivedGraph {
    /// The derived vertex set: every root plus every vertex reached.
    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Directed pairs with their path-count multiplicities.
    pub fn pairs(&self) -> &BTreeMap<(VertexId, VertexId), usize> {
        &self.pairs
    }

    /// Total derived edge count (multiplicities summed).
    pub fn edge_count(&self) -> usize {
        self.pairs.values().sum()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    /// The expression the graph was derived from.
    pub fn expr(&self) -> &PathExpr {
        &self.expr
    }

    /// The label the graph was materialized under, once it has been.
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Distinct out-neighbors of `v`, ascending by id.
    fn out_neighbors(&self, v: &VertexId) -> Vec<&VertexId> {
        self.pairs
            .range((v.clone(), VertexId::new(""))..)
            .take_while(|((u, _), _)| u == v)
            .map(|((_, w), _)| w)
            .collect()
    }

    /// Distinct in-neighbors of `v`, ascending by id.
    fn in_neighbors(&self, v: &VertexId) -> Vec<&VertexId> {
        self.pairs
            .keys()
            .filter(|(_, w)| w == v)
            .map(|(u, _)| u)
            .collect()
    }
}

/// Evaluates `expr` once per root (each with a fresh, empty environment)
/// and records an edge root→v for every occurrence of v in that root's
/// result bag.
pub fn derive(
    g: &PropertyGraph,
    expr: &PathExpr,
    roots: RootSpec,
) -> Result<DerivedGraph, DeriveError> {
    if !expr.ends_on_vertex() {
        return Err(DeriveError::ExpressionEndsOnEdge);
    }
    let roots: Vec<VertexId> = match roots {
        RootSpec::All => g.vertex_ids().cloned().collect(),
        RootSpec::Ids(ids) => ids,
    };
    let mut vertices: BTreeSet<VertexId> = BTreeSet::new();
    let mut pairs: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for r in &roots {
        let mut env = Env::new();
        let bag = evaluate(g, std::slice::from_ref(r), expr, &mut env)?;
        vertices.insert(r.clone());
        for el in bag {
            let v = el
                .as_vertex()
                .expect("vertex-ending expression yields vertices")
                .clone();
            vertices.insert(v.clone());
            *pairs.entry((r.clone(), v)).or_insert(0) += 1;
        }
    }
    Ok(DerivedGraph {
        vertices,
        pairs,
        expr: expr.clone(),
        label: None,
    })
}

/// Writes the derived edges into `g` as real edges — one per unit of
/// multiplicity, labeled `label`, stamped `derived=true` — and records the
/// label on the derived graph. Returns the number of edges created. The
/// label must not already appear in `g`, so derived edges stay separable.
pub fn materialize(
    g: &mut PropertyGraph,
    d: &mut DerivedGraph,
    label: &str,
) -> Result<usize, DeriveError> {
    if label.is_empty() {
        return Err(DeriveError::EmptyLabel);
    }
    if g.edges().any(|e| e.label() == label) {
        return Err(DeriveError::LabelCollision(label.to_owned()));
    }
    let mut created = 0;
    for ((u, v), multiplicity) in &d.pairs {
        for _ in 0..*multiplicity {
            let mut properties = PropertyMap::new();
            properties.insert(DERIVED_PROP.to_owned(), PropertyValue::Bool(true));
            g.add_edge(u, v, label, properties)?;
            created += 1;
        }
    }
    d.label = Some(label.to_owned());
    Ok(created)
}

fn bfs_distances<'g>(
    start: &VertexId,
    neighbors: impl Fn(&VertexId) -> Vec<&'g VertexId>,
) -> BTreeMap<VertexId, usize> {
    let mut dist = BTreeMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for w in neighbors(&v) {
            if !dist.contains_key(w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w.clone());
            }
        }
    }
    dist
}

/// Minimum-hop directed path from `a` to `b` over derived edges (unit
/// cost, multiplicities ignored), or `None` when `b` is unreachable.
/// Among all minimum-hop paths, returns the lexicographically smallest
/// id sequence, so the answer is reproducible.
pub fn shortest_path(
    d: &DerivedGraph,
    a: &VertexId,
    b: &VertexId,
) -> Result<Option<Vec<VertexId>>, DeriveError> {
    for v in [a, b] {
        if !d.contains_vertex(v) {
            return Err(DeriveError::UnknownVertex(v.clone()));
        }
    }
    if a == b {
        return Ok(Some(vec![a.clone()]));
    }
    let from_a = bfs_distances(a, |v| d.out_neighbors(v));
    let Some(&total) = from_a.get(b) else {
        return Ok(None);
    };
    let to_b = bfs_distances(b, |v| d.in_neighbors(v));

    // Greedy front-to-back choice: at hop k, take the smallest successor
    // that some minimum-hop path passes through at position k.
    let mut path = vec![a.clone()];
    let mut cursor = a.clone();
    for hop in 1..=total {
        let next = d
            .out_neighbors(&cursor)
            .into_iter()
            .find(|w| from_a.get(*w) == Some(&hop) && to_b.get(*w) == Some(&(total - hop)))
            .expect("a shortest path exists through every prefix")
            .clone();
        path.push(next.clone());
        cursor = next;
    }
    Ok(Some(path))
}

/// Every derived vertex with its out-degree (multiplicities counted),
/// sorted descending by degree with ties ascending by id.
pub fn degree_ranking(d: &DerivedGraph) -> Vec<(VertexId, usize)> {
    let mut degrees: BTreeMap<&VertexId, usize> = d.vertices.iter().map(|v| (v, 0)).collect();
    for ((u, _), multiplicity) in &d.pairs {
        *degrees
            .get_mut(u)
            .expect("pair endpoints are derived vertices") += multiplicity;
    }
    let mut ranking: Vec<(VertexId, usize)> =
        degrees.into_iter().map(|(v, n)| (v.clone(), n)).collect();
    ranking.sort_by(|(va, na), (vb, nb)| nb.cmp(na).then_with(|| va.cmp(vb)));
    ranking
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathlang::parse;
    use crate::props;

    const FOAF: &str = "./outE[@label='friend']/inV/outE[@label='friend']/inV";

    fn vid(s: &str) -> VertexId {
        VertexId::new(s)
    }

    fn pair(a: &str, b: &str) -> (VertexId, VertexId) {
        (vid(a), vid(b))
    }

    fn chain() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        for id in ["a", "b", "c"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        g.add_edge(&vid("a"), &vid("b"), "friend", props!())
            .unwrap();
        g.add_edge(&vid("b"), &vid("c"), "friend", props!())
            .unwrap();
        g
    }

    #[test]
    fn chain_derivation_finds_the_single_two_hop_pair() {
        let g = chain();
        let d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        assert_eq!(d.pairs(), &BTreeMap::from([(pair("a", "c"), 1)]));
        assert_eq!(
            d.vertices(),
            &BTreeSet::from([vid("a"), vid("b"), vid("c")])
        );
        assert_eq!(d.edge_count(), 1);
        assert_eq!(d.label(), None);
    }

    #[test]
    fn empty_graph_derives_empty() {
        let g = PropertyGraph::new();
        let d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        assert!(d.vertices().is_empty());
        assert!(d.pairs().is_empty());
    }

    #[test]
    fn identity_expression_derives_a_loop_at_every_root() {
        let g = chain();
        let d = derive(&g, &parse(".").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            d.pairs(),
            &BTreeMap::from([
                (pair("a", "a"), 1),
                (pair("b", "b"), 1),
                (pair("c", "c"), 1),
            ])
        );
    }

    #[test]
    fn explicit_roots_restrict_the_derivation() {
        let g = chain();
        let d = derive(
            &g,
            &parse("./outE/inV").unwrap(),
            RootSpec::Ids(vec![vid("b")]),
        )
        .unwrap();
        assert_eq!(d.pairs(), &BTreeMap::from([(pair("b", "c"), 1)]));
        // roots always join the vertex set, reached or not
        assert_eq!(d.vertices(), &BTreeSet::from([vid("b"), vid("c")]));
    }

    #[test]
    fn edge_final_expressions_are_rejected() {
        let g = chain();
        assert_eq!(
            derive(&g, &parse("./outE").unwrap(), RootSpec::All),
            Err(DeriveError::ExpressionEndsOnEdge)
        );
    }

    #[test]
    fn unknown_roots_and_unbound_variables_surface_as_errors() {
        let g = chain();
        let expr = parse("./outE/inV").unwrap();
        assert_eq!(
            derive(&g, &expr, RootSpec::Ids(vec![vid("ghost")])),
            Err(DeriveError::Eval(EvalError::UnknownRoot(vid("ghost"))))
        );
        let unbound = parse("./outE/inV[g:except($x)]").unwrap();
        assert_eq!(
            derive(&g, &unbound, RootSpec::All),
            Err(DeriveError::Eval(EvalError::UnboundVariable("$x".into())))
        );
    }

    #[test]
    fn materialize_writes_labeled_stamped_edges() {
        let mut g = chain();
        let mut d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        let edges_before = g.edge_count();
        let created = materialize(&mut g, &mut d, "friend-of-a-friend").unwrap();
        assert_eq!(created, 1);
        assert_eq!(g.edge_count(), edges_before + 1);
        assert_eq!(d.label(), Some("friend-of-a-friend"));
        let e = g
            .edges()
            .find(|e| e.label() == "friend-of-a-friend")
            .unwrap();
        assert_eq!((e.tail(), e.head()), (&vid("a"), &vid("c")));
        assert_eq!(e.property(DERIVED_PROP), Some(&PropertyValue::Bool(true)));
    }

    #[test]
    fn materialize_emits_one_edge_per_unit_of_multiplicity() {
        let mut g = PropertyGraph::new();
        for id in ["a", "b", "c"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for _ in 0..2 {
            g.add_edge(&vid("a"), &vid("b"), "friend", props!())
                .unwrap();
            g.add_edge(&vid("b"), &vid("c"), "friend", props!())
                .unwrap();
        }
        // 2×2 = 4 friend-paths a⇒c
        let mut d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        assert_eq!(d.pairs(), &BTreeMap::from([(pair("a", "c"), 4)]));
        let created = materialize(&mut g, &mut d, "foaf").unwrap();
        assert_eq!(created, 4);
        assert_eq!(g.edges().filter(|e| e.label() == "foaf").count(), 4);
    }

    #[test]
    fn materialize_rejects_empty_and_colliding_labels() {
        let mut g = chain();
        let mut d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            materialize(&mut g, &mut d, ""),
            Err(DeriveError::EmptyLabel)
        );
        assert_eq!(
            materialize(&mut g, &mut d, "friend"),
            Err(DeriveError::LabelCollision("friend".into()))
        );
        assert_eq!(d.label(), None); // failures record nothing
    }

    #[test]
    fn materialized_edges_rederive_the_same_graph() {
        let mut g = PropertyGraph::new();
        for id in ["a", "b", "c"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for (t, h) in [
            ("a", "b"),
            ("b", "c"),
            ("c", "a"),
            ("b", "a"),
            ("c", "b"),
            ("a", "c"),
        ] {
            g.add_edge(&vid(t), &vid(h), "friend", props!()).unwrap();
        }
        let mut d = derive(&g, &parse(FOAF).unwrap(), RootSpec::All).unwrap();
        materialize(&mut g, &mut d, "foaf").unwrap();
        let rederived = derive(
            &g,
            &parse("./outE[@label='foaf']/inV").unwrap(),
            RootSpec::All,
        )
        .unwrap();
        assert_eq!(rederived.pairs(), d.pairs());
        assert_eq!(rederived.vertices(), d.vertices());
    }

    #[test]
    fn shortest_path_basics() {
        let g = chain();
        let d = derive(&g, &parse("./outE/inV").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            shortest_path(&d, &vid("a"), &vid("c")).unwrap(),
            Some(vec![vid("a"), vid("b"), vid("c")])
        );
        assert_eq!(
            shortest_path(&d, &vid("a"), &vid("a")).unwrap(),
            Some(vec![vid("a")])
        );
        assert_eq!(shortest_path(&d, &vid("c"), &vid("a")).unwrap(), None);
        assert_eq!(
            shortest_path(&d, &vid("a"), &vid("ghost")),
            Err(DeriveError::UnknownVertex(vid("ghost")))
        );
    }

    #[test]
    fn shortest_path_breaks_ties_lexicographically() {
        // two 2-hop routes a→m1→z and a→m2→z; m1 wins on id order
        let mut g = PropertyGraph::new();
        for id in ["a", "m1", "m2", "z"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for (t, h) in [("a", "m2"), ("a", "m1"), ("m2", "z"), ("m1", "z")] {
            g.add_edge(&vid(t), &vid(h), "e", props!()).unwrap();
        }
        let d = derive(&g, &parse("./outE/inV").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            shortest_path(&d, &vid("a"), &vid("z")).unwrap(),
            Some(vec![vid("a"), vid("m1"), vid("z")])
        );
    }

    #[test]
    fn shortest_path_prefers_fewer_hops_over_smaller_ids() {
        // a→b→z (2 hops) vs a→z directly (1 hop): hops win
        let mut g = PropertyGraph::new();
        for id in ["a", "b", "z"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for (t, h) in [("a", "b"), ("b", "z"), ("a", "z")] {
            g.add_edge(&vid(t), &vid(h), "e", props!()).unwrap();
        }
        let d = derive(&g, &parse("./outE/inV").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            shortest_path(&d, &vid("a"), &vid("z")).unwrap(),
            Some(vec![vid("a"), vid("z")])
        );
    }

    #[test]
    fn degree_ranking_orders_by_degree_then_id() {
        let mut g = PropertyGraph::new();
        for id in ["hub", "l1", "l2", "l3"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for leaf in ["l1", "l2", "l3"] {
            g.add_edge(&vid("hub"), &vid(leaf), "spoke", props!())
                .unwrap();
        }
        g.add_edge(&vid("l2"), &vid("hub"), "back", props!())
            .unwrap();
        let d = derive(&g, &parse("./outE/inV").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            degree_ranking(&d),
            vec![
                (vid("hub"), 3),
                (vid("l2"), 1),
                (vid("l1"), 0),
                (vid("l3"), 0),
            ]
        );
        assert!(
            degree_ranking(&derive(&g, &parse(".").unwrap(), RootSpec::Ids(vec![])).unwrap())
                .is_empty()
        );
    }

    #[test]
    fn degree_ranking_counts_multiplicity() {
        let mut g = PropertyGraph::new();
        for id in ["a", "b", "c"] {
            g.add_vertex_with_id(vid(id), props!()).unwrap();
        }
        for _ in 0..3 {
            g.add_edge(&vid("a"), &vid("b"), "e", props!()).unwrap();
        }
        g.add_edge(&vid("c"), &vid("b"), "e", props!()).unwrap();
        let d = derive(&g, &parse("./outE/inV").unwrap(), RootSpec::All).unwrap();
        assert_eq!(
            degree_ranking(&d),
            vec![(vid("a"), 3), (vid("c"), 1), (vid("b"), 0)]
        );
    }

    #[test]
    fn adding_edges_never_lengthens_shortest_paths() {
        let mut g = chain();
        let expr = parse("./outE/inV").unwrap();
        let before = derive(&g, &expr, RootSpec::All).unwrap();
        let hops_before = shortest_path(&before, &vid("a"), &vid("c"))
            .unwrap()
            .unwrap()
            .len();
        g.add_edge(&vid("a"), &vid("c"), "shortcut", props!())
            .unwrap();
        let after = derive(&g, &expr, RootSpec::All).unwrap();
        let hops_after = shortest_path(&after, &vid("a"), &vid("c"))
            .unwrap()
            .unwrap()
            .len();
        assert!(hops_after <= hops_before);
    }
}
