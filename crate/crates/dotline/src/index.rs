//! Endogenous property index: a balanced binary comparison tree built out of
//! ordinary vertices and edges *inside the graph it indexes*, so the index
//! is itself graph data — it saves, loads, and traverses like anything else.
//!
//! Shape: every index vertex carries `kind=index`. The root additionally
//! carries `indexed_key` (the property key the tree covers). Internal nodes
//! carry a `split` value and two outgoing edges labeled `lt` (subtree of
//! values strictly below the split) and `gte` (values at or above it).
//! Leaves carry a `value` and one `hit`-labeled edge per data vertex whose
//! key equals that value; duplicated values share a single leaf.
//!
//! Lookups descend comparisons from the root, so cost is logarithmic in the
//! number of distinct values. Incremental maintenance is explicit
//! ([`index_insert`] / [`index_remove`]); a mutation that leaves the tree
//! deeper than the advertised bound triggers a full rebuild over the same
//! indexed set.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{ElementId, GraphError, PropertyGraph, PropertyMap, VertexId};
use crate::value::{PropertyValue, ValueTag};
use crate::KIND_KEY;

/// `kind` value marking every vertex that belongs to an index tree.
pub const KIND_INDEX: &str = "index";
/// Root-only property naming the key the tree indexes.
pub const INDEXED_KEY_PROP: &str = "indexed_key";
/// Internal-node property holding the comparison value.
pub const SPLIT_PROP: &str = "split";
/// Leaf property holding the indexed value.
pub const VALUE_PROP: &str = "value";
/// Bin label for the strictly-less subtree.
pub const BIN_LT: &str = "lt";
/// Bin label for the greater-or-equal subtree.
pub const BIN_GTE: &str = "gte";
/// Label of leaf-to-data edges.
pub const HIT_LABEL: &str = "hit";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("key \"{0}\" is reserved and cannot be indexed")]
    KeyIsReserved(String),
    #[error("index on \"{key}\" holds {expected} values but met a {found} value")]
    TypeMismatch {
        key: String,
        expected: ValueTag,
        found: ValueTag,
    },
    #[error("vertex \"{0}\" does not exist")]
    UnknownVertex(VertexId),
    #[error("vertex \"{vertex}\" has no \"{key}\" property")]
    MissingKey { vertex: VertexId, key: String },
    #[error("vertex \"{0}\" belongs to an index and cannot be indexed itself")]
    IndexVertex(VertexId),
    #[error("index rooted at \"{root}\" is malformed: {detail}")]
    Corrupt { root: VertexId, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Handle to one index tree: the root vertex plus the key it covers. The
/// tree itself lives in the graph; the handle is just a way back to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTree {
    root: VertexId,
    key: String,
}

impl IndexTree {
    pub fn root(&self) -> &VertexId {
        &self.root
    }

    pub fn key(&self) -> &str {
        &self.key
    }
}

fn is_index_vertex(g: &PropertyGraph, v: &VertexId) -> bool {
    g.vertex(v)
        .and_then(|vx| vx.property(KIND_KEY))
        .and_then(PropertyValue::as_text)
        .is_some_and(|kind| kind == KIND_INDEX)
}

fn node_property<'g>(g: &'g PropertyGraph, v: &VertexId, key: &str) -> Option<&'g PropertyValue> {
    g.vertex(v).and_then(|vx| vx.property(key))
}

/// Child of `node` down the `bin` edge, if present.
fn child(g: &PropertyGraph, node: &VertexId, bin: &str) -> Option<VertexId> {
    let edges = g.out_edges(node, Some(bin)).ok()?;
    let e = edges.first()?;
    Some(g.edge(e).expect("edge id from adjacency").head().clone())
}

/// Data vertices hit by a leaf, in hit-edge insertion order.
fn hits(g: &PropertyGraph, leaf: &VertexId) -> Vec<VertexId> {
    g.out_edges(leaf, Some(HIT_LABEL))
        .map(|edges| {
            edges
                .iter()
                .map(|e| g.edge(e).expect("edge id from adjacency").head().clone())
                .collect()
        })
        .unwrap_or_default()
}

/// Index-vertex parent of `node` via an incoming bin edge, if any.
fn parent(g: &PropertyGraph, node: &VertexId) -> Option<VertexId> {
    for e in g.in_edges(node, None).ok()? {
        let edge = g.edge(&e).expect("edge id from adjacency");
        if (edge.label() == BIN_LT || edge.label() == BIN_GTE) && is_index_vertex(g, edge.tail()) {
            return Some(edge.tail().clone());
        }
    }
    None
}

/// All index vertices of the tree rooted at `root`, including the root.
fn tree_vertices(g: &PropertyGraph, root: &VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut stack = vec![root.clone()];
    while let Some(node) = stack.pop() {
        for bin in [BIN_LT, BIN_GTE] {
            if let Some(c) = child(g, &node, bin) {
                stack.push(c);
            }
        }
        out.push(node);
    }
    out
}

fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Longest root-to-leaf path counted in comparisons (index vertices holding
/// a split or value). A bare root indexes nothing and has depth 0.
pub fn tree_depth(g: &PropertyGraph, t: &IndexTree) -> usize {
    fn walk(g: &PropertyGraph, node: &VertexId) -> usize {
        if node_property(g, node, VALUE_PROP).is_some() {
            return 1;
        }
        if node_property(g, node, SPLIT_PROP).is_none() {
            return 0;
        }
        let deepest = [BIN_LT, BIN_GTE]
            .iter()
            .filter_map(|bin| child(g, node, bin))
            .map(|c| walk(g, &c))
            .max()
            .unwrap_or(0);
        1 + deepest
    }
    walk(g, &t.root)
}

/// Number of `hit` edges in the tree — the size of the indexed set.
pub fn indexed_count(g: &PropertyGraph, t: &IndexTree) -> usize {
    tree_vertices(g, &t.root)
        .iter()
        .map(|v| hits(g, v).len())
        .sum()
}

fn validate_handle(g: &PropertyGraph, t: &IndexTree) -> Result<(), IndexError> {
    let root = g
        .vertex(&t.root)
        .ok_or_else(|| IndexError::UnknownVertex(t.root.clone()))?;
    let key_matches = root
        .property(INDEXED_KEY_PROP)
        .and_then(PropertyValue::as_text)
        .is_some_and(|k| k == t.key);
    if !is_index_vertex(g, &t.root) || !key_matches {
        return Err(IndexError::Corrupt {
            root: t.root.clone(),
            detail: format!("root is not an index root for key \"{}\"", t.key),
        });
    }
    Ok(())
}

/// The value tag the tree covers, read off the root's split/value property.
/// `None` for an empty tree.
fn tree_tag(g: &PropertyGraph, root: &VertexId) -> Option<ValueTag> {
    node_property(g, root, SPLIT_PROP)
        .or_else(|| node_property(g, root, VALUE_PROP))
        .map(PropertyValue::tag)
}

/// Finds the existing index over `key`, if one was built (in this session
/// or in a loaded file).
pub fn find_index(g: &PropertyGraph, key: &str) -> Option<IndexTree> {
    for v in g.vertices() {
        if is_index_vertex(g, v.id())
            && v.property(INDEXED_KEY_PROP)
                .and_then(PropertyValue::as_text)
                .is_some_and(|k| k == key)
        {
            return Some(IndexTree {
                root: v.id().clone(),
                key: key.to_owned(),
            });
        }
    }
    None
}

/// Deletes the tree's index vertices (and, by cascade, its bin and `hit`
/// edges). Data vertices are untouched.
pub fn remove_index(g: &mut PropertyGraph, t: &IndexTree) -> Result<(), IndexError> {
    validate_handle(g, t)?;
    for v in tree_vertices(g, &t.root) {
        g.remove_vertex(&v)?;
    }
    Ok(())
}

/// Writes the subtree for `entries[lo..hi]` (ascending distinct values,
/// each with its data vertices in id order) into the existing vertex
/// `node`.
fn fill_node(
    g: &mut PropertyGraph,
    node: &VertexId,
    entries: &[(PropertyValue, Vec<VertexId>)],
    lo: usize,
    hi: usize,
) -> Result<(), GraphError> {
    if hi - lo == 1 {
        let (value, members) = &entries[lo];
        g.set_property(&ElementId::Vertex(node.clone()), VALUE_PROP, value.clone())?;
        for m in members {
            g.add_edge(node, m, HIT_LABEL, PropertyMap::new())?;
        }
        return Ok(());
    }
    let mid = lo + (hi - lo) / 2;
    g.set_property(
        &ElementId::Vertex(node.clone()),
        SPLIT_PROP,
        entries[mid].0.clone(),
    )?;
    let mut index_props = PropertyMap::new();
    index_props.insert(KIND_KEY.to_owned(), PropertyValue::text(KIND_INDEX));
    let left = g.add_vertex(index_props.clone());
    g.add_edge(node, &left, BIN_LT, PropertyMap::new())?;
    fill_node(g, &left, entries, lo, mid)?;
    let right = g.add_vertex(index_props);
    g.add_edge(node, &right, BIN_GTE, PropertyMap::new())?;
    fill_node(g, &right, entries, mid, hi)
}

/// Groups `(value, vertex)` pairs into ascending distinct-value entries,
/// enforcing a single value tag across the key.
fn group_entries(
    key: &str,
    mut pairs: Vec<(PropertyValue, VertexId)>,
) -> Result<Vec<(PropertyValue, Vec<VertexId>)>, IndexError> {
    if let Some((first, _)) = pairs.first() {
        let expected = first.tag();
        for (value, _) in &pairs {
            if value.tag() != expected {
                return Err(IndexError::TypeMismatch {
                    key: key.to_owned(),
                    expected,
                    found: value.tag(),
                });
            }
        }
    }
    pairs.sort_by(|(va, ia), (vb, ib)| {
        va.try_cmp(vb)
            .expect("single tag enforced above")
            .then_with(|| ia.cmp(ib))
    });
    let mut entries: Vec<(PropertyValue, Vec<VertexId>)> = Vec::new();
    for (value, id) in pairs {
        match entries.last_mut() {
            Some((v, members)) if *v == value => members.push(id),
            _ => entries.push((value, vec![id])),
        }
    }
    Ok(entries)
}

/// Builds a balanced index over `key` across every non-index vertex that
/// carries it, replacing any previous index on the same key. Returns a
/// handle to the new tree.
pub fn build_index(g: &mut PropertyGraph, key: &str) -> Result<IndexTree, IndexError> {
    if key == KIND_KEY {
        return Err(IndexError::KeyIsReserved(key.to_owned()));
    }
    let mut pairs = Vec::new();
    for v in g.vertices() {
        if is_index_vertex(g, v.id()) {
            continue;
        }
        if let Some(value) = v.property(key) {
            pairs.push((value.clone(), v.id().clone()));
        }
    }
    let entries = group_entries(key, pairs)?;

    if let Some(existing) = find_index(g, key) {
        remove_index(g, &existing)?;
    }

    let mut root_props = PropertyMap::new();
    root_props.insert(KIND_KEY.to_owned(), PropertyValue::text(KIND_INDEX));
    root_props.insert(INDEXED_KEY_PROP.to_owned(), PropertyValue::text(key));
    let root = g.add_vertex(root_props);
    if !entries.is_empty() {
        fill_node(g, &root, &entries, 0, entries.len()).map_err(IndexError::Graph)?;
    }
    Ok(IndexTree {
        root,
        key: key.to_owned(),
    })
}

/// [`lookup`] plus the number of index-vertex comparisons the descent
/// performed, for cost-bound instrumentation.
pub fn lookup_counted(
    g: &PropertyGraph,
    t: &IndexTree,
    value: &PropertyValue,
) -> Result<(BTreeSet<VertexId>, usize), IndexError> {
    validate_handle(g, t)?;
    let Some(expected) = tree_tag(g, &t.root) else {
        return Ok((BTreeSet::new(), 0)); // empty tree matches nothing
    };
    if value.tag() != expected {
        return Err(IndexError::TypeMismatch {
            key: t.key.clone(),
            expected,
            found: value.tag(),
        });
    }
    let mut node = t.root.clone();
    let mut visits = 0usize;
    loop {
        if let Some(leaf_value) = node_property(g, &node, VALUE_PROP) {
            visits += 1;
            let matched = value.try_cmp(leaf_value) == Some(std::cmp::Ordering::Equal);
            let result = if matched {
                hits(g, &node).into_iter().collect()
            } else {
                BTreeSet::new()
            };
            return Ok((result, visits));
        }
        let Some(split) = node_property(g, &node, SPLIT_PROP) else {
            return Err(IndexError::Corrupt {
                root: t.root.clone(),
                detail: format!("vertex \"{node}\" has neither split nor value"),
            });
        };
        visits += 1;
        let bin = match value.try_cmp(split) {
            Some(std::cmp::Ordering::Less) => BIN_LT,
            Some(_) => BIN_GTE,
            None => {
                return Err(IndexError::Corrupt {
                    root: t.root.clone(),
                    detail: format!("vertex \"{node}\" splits on a differently-typed value"),
                })
            }
        };
        node = child(g, &node, bin).ok_or_else(|| IndexError::Corrupt {
            root: t.root.clone(),
            detail: format!("vertex \"{node}\" is missing its {bin} child"),
        })?;
    }
}

/// Exactly the non-index vertices whose indexed key equals `value`; the
/// same set a linear scan over the graph would produce.
pub fn lookup(
    g: &PropertyGraph,
    t: &IndexTree,
    value: &PropertyValue,
) -> Result<BTreeSet<VertexId>, IndexError> {
    lookup_counted(g, t, value).map(|(result, _)| result)
}

/// In-order walk collecting the indexed entries exactly as stored.
fn collect_entries(
    g: &PropertyGraph,
    node: &VertexId,
    out: &mut Vec<(PropertyValue, Vec<VertexId>)>,
) {
    if let Some(value) = node_property(g, node, VALUE_PROP) {
        out.push((value.clone(), hits(g, node)));
        return;
    }
    if let Some(left) = child(g, node, BIN_LT) {
        collect_entries(g, &left, out);
    }
    if let Some(right) = child(g, node, BIN_GTE) {
        collect_entries(g, &right, out);
    }
}

/// Rebuilds the tree in place (same root vertex, same indexed set) when a
/// mutation has left it deeper than the advertised lookup bound.
fn rebalance_if_deep(g: &mut PropertyGraph, t: &IndexTree) -> Result<(), IndexError> {
    let n = indexed_count(g, t);
    if tree_depth(g, t) <= 2 * ceil_log2(n + 1) {
        return Ok(());
    }
    let mut entries = Vec::new();
    collect_entries(g, &t.root, &mut entries);
    for v in tree_vertices(g, &t.root) {
        if v != t.root {
            g.remove_vertex(&v)?;
        }
    }
    for e in g.out_edges(&t.root, Some(HIT_LABEL))? {
        g.remove_edge(&e)?;
    }
    let root_element = ElementId::Vertex(t.root.clone());
    g.remove_property(&root_element, SPLIT_PROP)?;
    g.remove_property(&root_element, VALUE_PROP)?;
    if !entries.is_empty() {
        fill_node(g, &t.root, &entries, 0, entries.len())?;
    }
    Ok(())
}

/// Adds `v` to the index so later lookups of its key value include it.
/// Inserting a vertex the tree already hits is a no-op.
pub fn index_insert(g: &mut PropertyGraph, t: &IndexTree, v: &VertexId) -> Result<(), IndexError> {
    validate_handle(g, t)?;
    if !g.contains_vertex(v) {
        return Err(IndexError::UnknownVertex(v.clone()));
    }
    if is_index_vertex(g, v) {
        return Err(IndexError::IndexVertex(v.clone()));
    }
    let value = node_property(g, v, &t.key)
        .cloned()
        .ok_or_else(|| IndexError::MissingKey {
            vertex: v.clone(),
            key: t.key.clone(),
        })?;
    if let Some(expected) = tree_tag(g, &t.root) {
        if value.tag() != expected {
            return Err(IndexError::TypeMismatch {
                key: t.key.clone(),
                expected,
                found: value.tag(),
            });
        }
    }

    // descend to the leaf whose bin covers the value
    let mut node = t.root.clone();
    loop {
        if let Some(leaf_value) = node_property(g, &node, VALUE_PROP).cloned() {
            if value == leaf_value {
                if !hits(g, &node).contains(v) {
                    g.add_edge(&node, v, HIT_LABEL, PropertyMap::new())?;
                }
            } else {
                split_leaf(g, &node, leaf_value, value, v)?;
            }
            break;
        }
        let Some(split) = node_property(g, &node, SPLIT_PROP).cloned() else {
            // bare root: the tree was empty, so the root becomes the first leaf
            g.set_property(&ElementId::Vertex(node.clone()), VALUE_PROP, value)?;
            g.add_edge(&node, v, HIT_LABEL, PropertyMap::new())?;
            break;
        };
        let bin = if value.try_cmp(&split) == Some(std::cmp::Ordering::Less) {
            BIN_LT
        } else {
            BIN_GTE
        };
        node = child(g, &node, bin).ok_or_else(|| IndexError::Corrupt {
            root: t.root.clone(),
            detail: format!("vertex \"{node}\" is missing its {bin} child"),
        })?;
    }
    rebalance_if_deep(g, t)
}

/// Turns leaf `node` (holding `old`) into an internal vertex over two fresh
/// leaves: the old one keeps its hits, the new one hits `v`.
fn split_leaf(
    g: &mut PropertyGraph,
    node: &VertexId,
    old: PropertyValue,
    new: PropertyValue,
    v: &VertexId,
) -> Result<(), IndexError> {
    let mut index_props = PropertyMap::new();
    index_props.insert(KIND_KEY.to_owned(), PropertyValue::text(KIND_INDEX));

    let old_leaf = g.add_vertex(index_props.clone());
    g.set_property(
        &ElementId::Vertex(old_leaf.clone()),
        VALUE_PROP,
        old.clone(),
    )?;
    for target in hits(g, node) {
        g.add_edge(&old_leaf, &target, HIT_LABEL, PropertyMap::new())?;
    }
    for e in g.out_edges(node, Some(HIT_LABEL))? {
        g.remove_edge(&e)?;
    }

    let new_leaf = g.add_vertex(index_props);
    g.set_property(
        &ElementId::Vertex(new_leaf.clone()),
        VALUE_PROP,
        new.clone(),
    )?;
    g.add_edge(&new_leaf, v, HIT_LABEL, PropertyMap::new())?;

    let node_element = ElementId::Vertex(node.clone());
    g.remove_property(&node_element, VALUE_PROP)?;
    let new_is_less = new.try_cmp(&old) == Some(std::cmp::Ordering::Less);
    let (split, lt_child, gte_child) = if new_is_less {
        (old, new_leaf, old_leaf)
    } else {
        (new, old_leaf, new_leaf)
    };
    g.set_property(&node_element, SPLIT_PROP, split)?;
    g.add_edge(node, &lt_child, BIN_LT, PropertyMap::new())?;
    g.add_edge(node, &gte_child, BIN_GTE, PropertyMap::new())?;
    Ok(())
}

/// Drops `v` from the index so later lookups no longer return it. Removing
/// a vertex the tree does not hit is a no-op.
pub fn index_remove(g: &mut PropertyGraph, t: &IndexTree, v: &VertexId) -> Result<(), IndexError> {
    validate_handle(g, t)?;
    if !g.contains_vertex(v) {
        return Err(IndexError::UnknownVertex(v.clone()));
    }

    // Find hit edges into v that belong to this tree (v may also be hit by
    // indices over other keys), walking leaf-to-root to attribute each.
    let mut doomed_edges = Vec::new();
    let mut touched_leaves = BTreeSet::new();
    for e in g.in_edges(v, Some(HIT_LABEL))? {
        let leaf = g.edge(&e).expect("edge id from adjacency").tail().clone();
        let mut cursor = leaf.clone();
        let in_this_tree = loop {
            if node_property(g, &cursor, INDEXED_KEY_PROP).is_some() {
                break cursor == t.root;
            }
            match parent(g, &cursor) {
                Some(p) => cursor = p,
                None => break false,
            }
        };
        if in_this_tree {
            doomed_edges.push(e);
            touched_leaves.insert(leaf);
        }
    }
    for e in &doomed_edges {
        g.remove_edge(e)?;
    }
    for leaf in touched_leaves {
        if hits(g, &leaf).is_empty() {
            splice_out_empty_leaf(g, t, &leaf)?;
        }
    }
    rebalance_if_deep(g, t)
}

/// Removes a leaf that no longer hits anything. The sibling's content is
/// pulled up onto the parent so ancestors keep their ids, and a root that
/// was its own leaf reverts to the bare-root (empty tree) form.
fn splice_out_empty_leaf(
    g: &mut PropertyGraph,
    t: &IndexTree,
    leaf: &VertexId,
) -> Result<(), IndexError> {
    if *leaf == t.root {
        g.remove_property(&ElementId::Vertex(leaf.clone()), VALUE_PROP)?;
        return Ok(());
    }
    let p = parent(g, leaf).ok_or_else(|| IndexError::Corrupt {
        root: t.root.clone(),
        detail: format!("leaf \"{leaf}\" has no parent"),
    })?;
    g.remove_vertex(leaf)?;
    let sibling = child(g, &p, BIN_LT)
        .or_else(|| child(g, &p, BIN_GTE))
        .ok_or_else(|| IndexError::Corrupt {
            root: t.root.clone(),
            detail: format!("vertex \"{p}\" lost both children"),
        })?;
    let p_element = ElementId::Vertex(p.clone());
    g.remove_property(&p_element, SPLIT_PROP)?;
    if let Some(value) = node_property(g, &sibling, VALUE_PROP).cloned() {
        g.set_property(&p_element, VALUE_PROP, value)?;
        for target in hits(g, &sibling) {
            g.add_edge(&p, &target, HIT_LABEL, PropertyMap::new())?;
        }
    } else {
        let split = node_property(g, &sibling, SPLIT_PROP)
            .cloned()
            .ok_or_else(|| IndexError::Corrupt {
                root: t.root.clone(),
                detail: format!("vertex \"{sibling}\" has neither split nor value"),
            })?;
        g.set_property(&p_element, SPLIT_PROP, split)?;
        for bin in [BIN_LT, BIN_GTE] {
            if let Some(c) = child(g, &sibling, bin) {
                g.add_edge(&p, &c, bin, PropertyMap::new())?;
            }
        }
    }
    g.remove_vertex(&sibling)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    /// Independent oracle: one pass over all vertices, no index involved.
    fn scan(g: &PropertyGraph, key: &str, value: &PropertyValue) -> BTreeSet<VertexId> {
        g.vertices()
            .filter(|v| {
                v.property(KIND_KEY).and_then(PropertyValue::as_text) != Some(KIND_INDEX)
                    && v.property(key) == Some(value)
            })
            .map(|v| v.id().clone())
            .collect()
    }

    /// Brute-force longest root-to-leaf walk over raw edges, independent of
    /// the module's own depth accounting.
    fn brute_depth(g: &PropertyGraph, node: &VertexId) -> usize {
        let mut deepest = 0;
        for e in g.out_edges(node, None).unwrap() {
            let edge = g.edge(&e).unwrap();
            if edge.label() == BIN_LT || edge.label() == BIN_GTE {
                deepest = deepest.max(brute_depth(g, edge.head()));
            }
        }
        1 + deepest
    }

    fn assert_matches_scan(g: &PropertyGraph, t: &IndexTree, values: &[PropertyValue]) {
        for value in values {
            assert_eq!(
                lookup(g, t, value).unwrap(),
                scan(g, t.key(), value),
                "lookup diverged from linear scan for {value}"
            );
        }
    }

    #[test]
    fn empty_graph_builds_bare_root() {
        let mut g = PropertyGraph::new();
        let t = build_index(&mut g, "name").unwrap();
        assert_eq!(g.vertex_count(), 1);
        let (result, visits) = lookup_counted(&g, &t, &"anything".into()).unwrap();
        assert!(result.is_empty());
        assert_eq!(visits, 0);
        // a differently-typed probe on an empty tree is not a mismatch
        assert!(lookup(&g, &t, &7.into()).unwrap().is_empty());
    }

    #[test]
    fn single_vertex_root_doubles_as_leaf() {
        let mut g = PropertyGraph::new();
        let v = g.add_vertex(props! {"name" => "josh"});
        let t = build_index(&mut g, "name").unwrap();
        assert_eq!(
            lookup(&g, &t, &"josh".into()).unwrap(),
            BTreeSet::from([v.clone()])
        );
        assert!(lookup(&g, &t, &"kim".into()).unwrap().is_empty());
        assert_eq!(g.out_edges(t.root(), Some(HIT_LABEL)).unwrap().len(), 1);
    }

    #[test]
    fn lookup_by_name_matches_scan_on_small_fixture() {
        let mut g = PropertyGraph::new();
        for name in ["josh", "kim", "alberto", "faunia", "josh"] {
            g.add_vertex(props! {"name" => name, "type" => "person"});
        }
        g.add_vertex(props! {"type" => "university"}); // no name: not indexed
        let t = build_index(&mut g, "name").unwrap();
        let probes: Vec<PropertyValue> = ["josh", "kim", "alberto", "faunia", "nobody"]
            .map(Into::into)
            .to_vec();
        assert_matches_scan(&g, &t, &probes);
        assert_eq!(lookup(&g, &t, &"josh".into()).unwrap().len(), 2);
    }

    #[test]
    fn hundred_distinct_values_stay_within_depth_bound() {
        let mut g = PropertyGraph::new();
        for i in 0..100i64 {
            g.add_vertex(props! {"score" => i});
        }
        let t = build_index(&mut g, "score").unwrap();
        assert!(brute_depth(&g, t.root()) <= 8); // ceil(log2 100) + 1
        let probes: Vec<PropertyValue> = (-1..101i64).map(Into::into).collect();
        assert_matches_scan(&g, &t, &probes);
    }

    #[test]
    fn duplicate_values_share_one_leaf() {
        let mut g = PropertyGraph::new();
        for i in 0..12i64 {
            g.add_vertex(props! {"band" => i % 3});
        }
        let t = build_index(&mut g, "band").unwrap();
        let leaves = tree_vertices(&g, t.root())
            .into_iter()
            .filter(|v| node_property(&g, v, VALUE_PROP).is_some())
            .count();
        assert_eq!(leaves, 3);
        for i in 0..3i64 {
            assert_eq!(lookup(&g, &t, &i.into()).unwrap().len(), 4);
        }
    }

    #[test]
    fn mixed_tags_fail_at_build_and_probe_time() {
        let mut g = PropertyGraph::new();
        g.add_vertex(props! {"x" => 1});
        let odd = g.add_vertex(props! {"x" => "one"});
        assert_eq!(
            build_index(&mut g, "x"),
            Err(IndexError::TypeMismatch {
                key: "x".into(),
                expected: ValueTag::Int,
                found: ValueTag::Text,
            })
        );
        g.remove_vertex(&odd).unwrap();
        let t = build_index(&mut g, "x").unwrap();
        assert!(matches!(
            lookup(&g, &t, &true.into()),
            Err(IndexError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn kind_key_is_reserved() {
        let mut g = PropertyGraph::new();
        assert_eq!(
            build_index(&mut g, "kind"),
            Err(IndexError::KeyIsReserved("kind".into()))
        );
    }

    #[test]
    fn rebuilding_replaces_the_previous_tree_for_that_key_only() {
        let mut g = PropertyGraph::new();
        g.add_vertex(props! {"name" => "a", "age" => 1});
        g.add_vertex(props! {"name" => "b", "age" => 2});
        let names = build_index(&mut g, "name").unwrap();
        let ages = build_index(&mut g, "age").unwrap();
        let count_before = g.vertex_count();
        let names2 = build_index(&mut g, "name").unwrap();
        assert_eq!(g.vertex_count(), count_before); // old name tree gone, new one equal-sized
        assert!(find_index(&g, "name").is_some());
        assert_ne!(names.root(), names2.root());
        assert_eq!(find_index(&g, "age").unwrap().root(), ages.root());
        assert_matches_scan(&g, &names2, &["a".into(), "b".into()]);
        assert_matches_scan(&g, &ages, &[1.into(), 2.into()]);
    }

    #[test]
    fn insert_and_remove_track_lookups() {
        let mut g = PropertyGraph::new();
        let a = g.add_vertex(props! {"name" => "a"});
        let t = build_index(&mut g, "name").unwrap();
        let b = g.add_vertex(props! {"name" => "b"});
        let a2 = g.add_vertex(props! {"name" => "a"});

        index_insert(&mut g, &t, &b).unwrap();
        index_insert(&mut g, &t, &a2).unwrap();
        index_insert(&mut g, &t, &a2).unwrap(); // idempotent
        assert_eq!(
            lookup(&g, &t, &"a".into()).unwrap(),
            BTreeSet::from([a.clone(), a2.clone()])
        );
        assert_eq!(
            lookup(&g, &t, &"b".into()).unwrap(),
            BTreeSet::from([b.clone()])
        );

        index_remove(&mut g, &t, &a).unwrap();
        assert_eq!(
            lookup(&g, &t, &"a".into()).unwrap(),
            BTreeSet::from([a2.clone()])
        );
        index_remove(&mut g, &t, &a).unwrap(); // absent: no-op
        index_remove(&mut g, &t, &a2).unwrap();
        index_remove(&mut g, &t, &b).unwrap();
        assert!(lookup(&g, &t, &"a".into()).unwrap().is_empty());
        assert!(lookup(&g, &t, &"b".into()).unwrap().is_empty());
        assert_eq!(indexed_count(&g, &t), 0);
    }

    #[test]
    fn insert_error_paths() {
        let mut g = PropertyGraph::new();
        g.add_vertex(props! {"name" => "a"});
        let t = build_index(&mut g, "name").unwrap();
        let bare = g.add_vertex(props!());
        assert_eq!(
            index_insert(&mut g, &t, &bare),
            Err(IndexError::MissingKey {
                vertex: bare.clone(),
                key: "name".into()
            })
        );
        let ghost = VertexId::new("ghost");
        assert_eq!(
            index_insert(&mut g, &t, &ghost),
            Err(IndexError::UnknownVertex(ghost))
        );
        let root = t.root().clone();
        assert_eq!(
            index_insert(&mut g, &t, &root),
            Err(IndexError::IndexVertex(root))
        );
        let wrong_tag = g.add_vertex(props! {"name" => 9});
        assert!(matches!(
            index_insert(&mut g, &t, &wrong_tag),
            Err(IndexError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn sequential_inserts_stay_within_rebalance_bound() {
        let mut g = PropertyGraph::new();
        let t = build_index(&mut g, "n").unwrap();
        for i in 0..64i64 {
            let v = g.add_vertex(props! {"n" => i});
            index_insert(&mut g, &t, &v).unwrap();
            let h = indexed_count(&g, &t);
            let depth = brute_depth(&g, t.root());
            assert!(
                depth <= 2 * ceil_log2(h + 1).max(1),
                "depth {depth} exceeds bound for {h} indexed vertices"
            );
        }
        let probes: Vec<PropertyValue> = (0..64i64).map(Into::into).collect();
        assert_matches_scan(&g, &t, &probes);
    }

    #[test]
    fn interleaved_random_maintenance_matches_scan() {
        let mut rng = StdRng::seed_from_u64(0x1dec5);
        let mut g = PropertyGraph::new();
        let mut pool = Vec::new();
        for i in 0..40i64 {
            pool.push(g.add_vertex(props! {"score" => i % 11}));
        }
        let t = build_index(&mut g, "score").unwrap();
        let mut indexed: BTreeSet<VertexId> = pool.iter().cloned().collect();
        for _ in 0..200 {
            let v = &pool[rng.random_range(0..pool.len())];
            if rng.random_bool(0.5) {
                index_insert(&mut g, &t, v).unwrap();
                indexed.insert(v.clone());
            } else {
                index_remove(&mut g, &t, v).unwrap();
                indexed.remove(v);
            }
        }
        // oracle: scan restricted to the vertices we chose to keep indexed
        let mut by_value: BTreeMap<i64, BTreeSet<VertexId>> = BTreeMap::new();
        for v in &indexed {
            if let Some(PropertyValue::Int(i)) = node_property(&g, v, "score") {
                by_value.entry(*i).or_default().insert(v.clone());
            }
        }
        for i in 0..11i64 {
            assert_eq!(
                lookup(&g, &t, &i.into()).unwrap(),
                by_value.remove(&i).unwrap_or_default(),
                "value {i} diverged after interleaved maintenance"
            );
        }
    }

    #[test]
    fn index_vertices_stay_separate_from_data() {
        let mut g = PropertyGraph::new();
        for i in 0..20i64 {
            g.add_vertex(props! {"n" => i / 2});
        }
        let data_vertices: BTreeSet<_> = g.vertex_ids().cloned().collect();
        let data_edges = g.edge_count();
        let t = build_index(&mut g, "n").unwrap();
        for v in tree_vertices(&g, t.root()) {
            assert!(is_index_vertex(&g, &v));
            for e in g.out_edges(&v, Some(HIT_LABEL)).unwrap() {
                let target = g.edge(&e).unwrap().head().clone();
                assert!(
                    !is_index_vertex(&g, &target),
                    "hit edge targets an index vertex"
                );
            }
        }
        let survivors: BTreeSet<_> = g
            .vertex_ids()
            .filter(|v| !is_index_vertex(&g, v))
            .cloned()
            .collect();
        assert_eq!(survivors, data_vertices);
        assert_eq!(
            g.edges()
                .filter(|e| !is_index_vertex(&g, e.tail()) && !is_index_vertex(&g, e.head()))
                .count(),
            data_edges
        );
        remove_index(&mut g, &t).unwrap();
        assert_eq!(
            g.vertex_ids().cloned().collect::<BTreeSet<_>>(),
            data_vertices
        );
    }

    #[test]
    fn index_survives_save_load_round_trip() {
        let mut g = PropertyGraph::new();
        for i in 0..25i64 {
            g.add_vertex(props! {"n" => i % 7});
        }
        let t = build_index(&mut g, "n").unwrap();
        let json = crate::io::to_json(&g);
        let g2 = crate::io::from_json(&json).unwrap();
        let t2 = find_index(&g2, "n").unwrap();
        assert_eq!(t2.root(), t.root());
        for i in 0..7i64 {
            assert_eq!(
                lookup(&g2, &t2, &i.into()).unwrap(),
                lookup(&g, &t, &i.into()).unwrap()
            );
        }
    }

    #[test]
    fn lookup_visit_count_stays_within_cost_bound() {
        let mut g = PropertyGraph::new();
        let n = 1000i64;
        for i in 0..n {
            g.add_vertex(props! {"n" => i % 250});
        }
        let t = build_index(&mut g, "n").unwrap();
        for i in 0..250i64 {
            let (result, visits) = lookup_counted(&g, &t, &i.into()).unwrap();
            assert!(visits <= 2 * ceil_log2(n as usize + 1) + result.len());
        }
    }
}
