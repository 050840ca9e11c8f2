//! Property graph storage: node and edge tables, per-node adjacency and
//! exact-match property indexes.
//!
//! A graph is built by a single writer, then sealed. Sealing sorts every
//! adjacency list by `(edge label, neighbour id, edge id)`, which is what
//! makes label-restricted expansion a range lookup and keeps traversal order
//! deterministic. After sealing the graph is immutable and can be shared
//! freely across threads.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::GraphError;
use crate::path::Path;
use crate::schema::{EdgeLabel, NodeLabel};
use crate::value::{IndexKey, PropertyValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl NodeId {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

pub type PropertyMap = BTreeMap<String, PropertyValue>;

static NULL: PropertyValue = PropertyValue::Null;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
    Both,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Outgoing => Direction::Incoming,
            Direction::Incoming => Direction::Outgoing,
            Direction::Both => Direction::Both,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    label: NodeLabel,
    props: PropertyMap,
}

impl Node {
    pub fn label(&self) -> NodeLabel {
        self.label
    }

    pub fn properties(&self) -> &PropertyMap {
        &self.props
    }

    /// Property value, or `Null` when absent.
    pub fn property(&self, name: &str) -> &PropertyValue {
        self.props.get(name).unwrap_or(&NULL)
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    label: EdgeLabel,
    src: NodeId,
    dst: NodeId,
    props: PropertyMap,
}

impl Edge {
    pub fn label(&self) -> EdgeLabel {
        self.label
    }

    pub fn src(&self) -> NodeId {
        self.src
    }

    pub fn dst(&self) -> NodeId {
        self.dst
    }

    pub fn properties(&self) -> &PropertyMap {
        &self.props
    }

    pub fn property(&self, name: &str) -> &PropertyValue {
        self.props.get(name).unwrap_or(&NULL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Adjacency {
    label: EdgeLabel,
    other: NodeId,
    edge: EdgeId,
}

type PropertyIndex = HashMap<IndexKey, Vec<NodeId>>;

/// Exact per-label cardinalities. Every label is present, zero or not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphCounts {
    pub nodes: BTreeMap<NodeLabel, u64>,
    pub edges: BTreeMap<EdgeLabel, u64>,
}

impl GraphCounts {
    pub fn total_nodes(&self) -> u64 {
        self.nodes.values().sum()
    }

    pub fn total_edges(&self) -> u64 {
        self.edges.values().sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<Adjacency>>,
    in_adj: Vec<Vec<Adjacency>>,
    by_label: [Vec<NodeId>; 7],
    edge_counts: [u64; 8],
    indexes: HashMap<NodeLabel, HashMap<String, PropertyIndex>>,
    sealed: bool,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize, edges: usize) -> Self {
        PropertyGraph {
            nodes: Vec::with_capacity(nodes),
            edges: Vec::with_capacity(edges),
            out_adj: Vec::with_capacity(nodes),
            in_adj: Vec::with_capacity(nodes),
            ..Self::default()
        }
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn add_node(&mut self, label: NodeLabel, props: PropertyMap) -> Result<NodeId, GraphError> {
        if self.sealed {
            return Err(GraphError::SealedGraph);
        }
        let id = NodeId(self.nodes.len() as u64);
        if let Some(label_indexes) = self.indexes.get_mut(&label) {
            for (prop, index) in label_indexes.iter_mut() {
                if let Some(key) = props.get(prop).and_then(PropertyValue::index_key) {
                    index.entry(key).or_default().push(id);
                }
            }
        }
        self.nodes.push(Node { label, props });
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        self.by_label[label.index()].push(id);
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        label: EdgeLabel,
        dst: NodeId,
        props: PropertyMap,
    ) -> Result<EdgeId, GraphError> {
        if self.sealed {
            return Err(GraphError::SealedGraph);
        }
        let src_label = self.node(src).ok_or(GraphError::UnknownNode(src))?.label;
        let dst_label = self.node(dst).ok_or(GraphError::UnknownNode(dst))?.label;
        let (expected_src, expected_dst) = label.signature();
        if (src_label, dst_label) != (expected_src, expected_dst) {
            return Err(GraphError::SignatureViolation {
                label,
                expected_src,
                expected_dst,
                actual_src: src_label,
                actual_dst: dst_label,
            });
        }
        let id = EdgeId(self.edges.len() as u64);
        self.edges.push(Edge { label, src, dst, props });
        self.out_adj[src.idx()].push(Adjacency { label, other: dst, edge: id });
        self.in_adj[dst.idx()].push(Adjacency { label, other: src, edge: id });
        self.edge_counts[label.index()] += 1;
        Ok(id)
    }

    /// Starts maintaining an exact-match index on `(label, property)`.
    /// Re-creating an existing index is a no-op.
    pub fn create_index(&mut self, label: NodeLabel, property: &str) -> Result<(), GraphError> {
        if self.sealed {
            return Err(GraphError::SealedGraph);
        }
        let label_indexes = self.indexes.entry(label).or_default();
        if label_indexes.contains_key(property) {
            return Ok(());
        }
        let mut index = PropertyIndex::new();
        for &id in &self.by_label[label.index()] {
            if let Some(key) = self.nodes[id.idx()].property(property).index_key() {
                index.entry(key).or_default().push(id);
            }
        }
        label_indexes.insert(property.to_owned(), index);
        Ok(())
    }

    /// Freezes the graph. Idempotent.
    pub fn seal(&mut self) {
        if self.sealed {
            return;
        }
        for list in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            list.sort_unstable();
            list.shrink_to_fit();
        }
        self.sealed = true;
    }

    /// Consuming variant of [`seal`](Self::seal).
    pub fn sealed(mut self) -> Self {
        self.seal();
        self
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.idx())
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.idx())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u64).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl DoubleEndedIterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u64).map(EdgeId)
    }

    /// All nodes carrying `label`, in ascending id order.
    pub fn nodes_with_label(&self, label: NodeLabel) -> &[NodeId] {
        &self.by_label[label.index()]
    }

    pub fn has_index(&self, label: NodeLabel, property: &str) -> bool {
        self.indexes.get(&label).is_some_and(|m| m.contains_key(property))
    }

    /// Maintained indexes, sorted.
    pub fn indexed_properties(&self) -> Vec<(NodeLabel, String)> {
        let mut out: Vec<_> = self.indexes.iter().flat_map(|(l, m)| m.keys().map(move |p| (*l, p.clone()))).collect();
        out.sort();
        out
    }

    /// Nodes with `label` whose `property` is strictly equal to `value`, in
    /// ascending id order. Served from the index when one exists, otherwise
    /// by scanning the label.
    pub fn index_lookup(&self, label: NodeLabel, property: &str, value: &PropertyValue) -> Vec<NodeId> {
        if let Some(index) = self.indexes.get(&label).and_then(|m| m.get(property)) {
            return match value.index_key() {
                Some(key) => index.get(&key).cloned().unwrap_or_default(),
                None => Vec::new(),
            };
        }
        self.scan_lookup(label, property, value)
    }

    /// Full label scan, ignoring any index.
    pub fn scan_lookup(&self, label: NodeLabel, property: &str, value: &PropertyValue) -> Vec<NodeId> {
        self.nodes_with_label(label)
            .iter()
            .copied()
            .filter(|id| self.nodes[id.idx()].property(property).strict_eq(value) == Some(true))
            .collect()
    }

    fn adjacency_slice(&self, list: &[Adjacency], label: Option<EdgeLabel>) -> (usize, usize) {
        match label {
            Some(l) if self.sealed => {
                let lo = list.partition_point(|a| a.label < l);
                let hi = lo + list[lo..].partition_point(|a| a.label == l);
                (lo, hi)
            }
            _ => (0, list.len()),
        }
    }

    /// Incident `(edge, neighbour)` pairs without allocating. `Both` yields
    /// outgoing entries first, then incoming; a self-loop shows up once in
    /// each.
    pub fn neighbors_iter(
        &self,
        node: NodeId,
        label: Option<EdgeLabel>,
        direction: Direction,
    ) -> Result<impl Iterator<Item = (EdgeId, NodeId)> + '_, GraphError> {
        let out = self.out_adj.get(node.idx()).ok_or(GraphError::UnknownNode(node))?;
        let inc = &self.in_adj[node.idx()];
        let empty: &[Adjacency] = &[];
        let out = if direction == Direction::Incoming {
            empty
        } else {
            let (lo, hi) = self.adjacency_slice(out, label);
            &out[lo..hi]
        };
        let inc = if direction == Direction::Outgoing {
            empty
        } else {
            let (lo, hi) = self.adjacency_slice(inc, label);
            &inc[lo..hi]
        };
        Ok(out.iter().chain(inc.iter()).filter(move |a| label.is_none_or(|l| a.label == l)).map(|a| (a.edge, a.other)))
    }

    pub fn neighbors(
        &self,
        node: NodeId,
        label: Option<EdgeLabel>,
        direction: Direction,
    ) -> Result<Vec<(EdgeId, NodeId)>, GraphError> {
        Ok(self.neighbors_iter(node, label, direction)?.collect())
    }

    /// Minimal-hop path from `src` to `dst` over edges whose label is in
    /// `labels`. See [`shortest_path_by`](Self::shortest_path_by).
    pub fn shortest_path(
        &self,
        src: NodeId,
        dst: NodeId,
        labels: &[EdgeLabel],
        max_hops: u32,
        direction: Direction,
    ) -> Result<Option<Path>, GraphError> {
        self.shortest_path_by(src, dst, max_hops, direction, |_, e| labels.contains(&e.label))
    }

    /// Minimal-hop path from `src` to `dst` over edges accepted by
    /// `edge_filter`, at most `max_hops` long.
    ///
    /// Among all minimal paths the one returned is the lexicographically
    /// smallest sequence of `(node, edge)` steps read from `src`: at every
    /// step the smallest neighbour id wins, then the smallest edge id. It is
    /// found by a breadth-first search backwards from `dst` followed by a
    /// greedy walk forwards from `src` along decreasing distance.
    pub fn shortest_path_by<F>(
        &self,
        src: NodeId,
        dst: NodeId,
        max_hops: u32,
        direction: Direction,
        edge_filter: F,
    ) -> Result<Option<Path>, GraphError>
    where
        F: Fn(EdgeId, &Edge) -> bool,
    {
        self.node(src).ok_or(GraphError::UnknownNode(src))?;
        self.node(dst).ok_or(GraphError::UnknownNode(dst))?;
        if src == dst {
            return Ok(Some(Path::single(src)));
        }

        let accept = |e: EdgeId| edge_filter(e, &self.edges[e.idx()]);
        let backwards = direction.reversed();
        let mut dist: HashMap<NodeId, u32> = HashMap::new();
        dist.insert(dst, 0);
        let mut queue = VecDeque::from([dst]);
        let mut found = false;
        'bfs: while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            if d >= max_hops {
                break;
            }
            for (e, m) in self.neighbors_iter(n, None, backwards)? {
                if !accept(e) || dist.contains_key(&m) {
                    continue;
                }
                dist.insert(m, d + 1);
                if m == src {
                    found = true;
                    break 'bfs;
                }
                queue.push_back(m);
            }
        }
        if !found {
            return Ok(None);
        }

        let mut path = Path::single(src);
        let mut current = src;
        let mut remaining = dist[&src];
        while remaining > 0 {
            let (next, edge) = self
                .neighbors_iter(current, None, direction)?
                .filter(|&(e, m)| accept(e) && dist.get(&m) == Some(&(remaining - 1)))
                .map(|(e, m)| (m, e))
                .min()
                .expect("distance labels guarantee a step towards dst");
            path.push(edge, next);
            current = next;
            remaining -= 1;
        }
        Ok(Some(path))
    }

    pub fn counts(&self) -> GraphCounts {
        GraphCounts {
            nodes: NodeLabel::ALL.into_iter().map(|l| (l, self.by_label[l.index()].len() as u64)).collect(),
            edges: EdgeLabel::ALL.into_iter().map(|l| (l, self.edge_counts[l.index()])).collect(),
        }
    }

    /// Full consistency check of edge table, adjacency and indexes.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen_out = HashSet::new();
        let mut seen_in = HashSet::new();
        for (i, list) in self.out_adj.iter().enumerate() {
            for a in list {
                let e = self.edge(a.edge).ok_or_else(|| format!("out-adjacency of n{i} names missing {}", a.edge))?;
                if e.src.idx() != i || e.dst != a.other || e.label != a.label {
                    return Err(format!("out-adjacency of n{i} disagrees with {}", a.edge));
                }
                if !seen_out.insert(a.edge) {
                    return Err(format!("{} listed twice in out-adjacency", a.edge));
                }
            }
        }
        for (i, list) in self.in_adj.iter().enumerate() {
            for a in list {
                let e = self.edge(a.edge).ok_or_else(|| format!("in-adjacency of n{i} names missing {}", a.edge))?;
                if e.dst.idx() != i || e.src != a.other || e.label != a.label {
                    return Err(format!("in-adjacency of n{i} disagrees with {}", a.edge));
                }
                if !seen_in.insert(a.edge) {
                    return Err(format!("{} listed twice in in-adjacency", a.edge));
                }
            }
        }
        if seen_out.len() != self.edges.len() || seen_in.len() != self.edges.len() {
            return Err("some edges are missing from adjacency".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (s, d) = e.label.signature();
            match (self.node(e.src), self.node(e.dst)) {
                (Some(a), Some(b)) if a.label == s && b.label == d => {}
                _ => return Err(format!("e{i} violates its endpoint signature")),
            }
        }
        for (label, m) in &self.indexes {
            for (prop, index) in m {
                for (key, ids) in index {
                    let value = match key {
                        IndexKey::Text(s) => PropertyValue::Text(s.clone()),
                        IndexKey::Integer(i) => PropertyValue::Integer(*i),
                        IndexKey::Real(b) => PropertyValue::Real(f64::from_bits(*b)),
                        IndexKey::Boolean(b) => PropertyValue::Boolean(*b),
                    };
                    if *ids != self.scan_lookup(*label, prop, &value) {
                        return Err(format!("index {label}.{prop} disagrees with a scan for {value}"));
                    }
                }
                let indexed: usize = index.values().map(Vec::len).sum();
                let expected = self
                    .nodes_with_label(*label)
                    .iter()
                    .filter(|id| self.nodes[id.idx()].property(prop).index_key().is_some())
                    .count();
                if indexed != expected {
                    return Err(format!("index {label}.{prop} holds {indexed} entries, expected {expected}"));
                }
            }
        }
        Ok(())
    }

    /// Text rendering of every node and edge in id order. Two graphs with
    /// equal dumps answer every query identically.
    pub fn canonical_dump(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = write!(out, "n{i}:{}", n.label);
            write_props(&mut out, &n.props);
            out.push('\n');
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = write!(out, "e{i}:{} {}->{}", e.label, e.src, e.dst);
            write_props(&mut out, &e.props);
            out.push('\n');
        }
        for (label, prop) in self.indexed_properties() {
            let _ = writeln!(out, "index {label}.{prop}");
        }
        out
    }
}

fn write_props(out: &mut String, props: &PropertyMap) {
    if props.is_empty() {
        return;
    }
    out.push_str(" {");
    for (i, (k, v)) in props.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{k}: {v}");
    }
    out.push('}');
}

/// Builds a [`PropertyMap`] from literal pairs.
///
/// ```
/// use litgraph_core::props;
/// let p = props! { "year" => 2017_i64, "title" => "T1" };
/// assert_eq!(p.len(), 2);
/// ```
#[macro_export]
macro_rules! props {
    () => { $crate::PropertyMap::new() };
    ($($k:expr => $v:expr),+ $(,)?) => {{
        let mut m = $crate::PropertyMap::new();
        $( m.insert(::std::string::String::from($k), $crate::PropertyValue::from($v)); )+
        m
    }};
}
