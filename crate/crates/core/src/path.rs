use serde::Serialize;

use crate::graph::{EdgeId, NodeId};

/// Alternating node/edge sequence. Always holds one more node than edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
}

impl Path {
    /// Zero-length path consisting of a single node.
    pub fn single(node: NodeId) -> Self {
        Path { nodes: vec![node], edges: Vec::new() }
    }

    /// Builds a path from its parts.
    ///
    /// # Panics
    ///
    /// If `nodes.len() != edges.len() + 1`.
    pub fn from_parts(nodes: Vec<NodeId>, edges: Vec<EdgeId>) -> Self {
        assert_eq!(nodes.len(), edges.len() + 1, "path needs one more node than edges");
        Path { nodes, edges }
    }

    pub fn push(&mut self, edge: EdgeId, node: NodeId) {
        self.edges.push(edge);
        self.nodes.push(node);
    }

    /// Removes the last step. A single-node path is left unchanged.
    pub fn pop(&mut self) -> Option<(EdgeId, NodeId)> {
        let edge = self.edges.pop()?;
        let node = self.nodes.pop().expect("one node per edge");
        Some((edge, node))
    }

    /// Appends `other`, whose first node must equal this path's last node.
    pub fn extend_with(&mut self, other: &Path) {
        debug_assert_eq!(self.end(), other.start());
        self.nodes.extend_from_slice(&other.nodes[1..]);
        self.edges.extend_from_slice(&other.edges);
    }

    /// The same path walked from its end to its start.
    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        let mut edges = self.edges.clone();
        nodes.reverse();
        edges.reverse();
        Path { nodes, edges }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().expect("path has at least one node")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }
}
