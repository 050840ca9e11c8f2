use crate::graph::{EdgeId, NodeId};
use crate::schema::{EdgeLabel, NodeLabel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("{label} must connect {expected_src} -> {expected_dst}, got {actual_src} -> {actual_dst}")]
    SignatureViolation {
        label: EdgeLabel,
        expected_src: NodeLabel,
        expected_dst: NodeLabel,
        actual_src: NodeLabel,
        actual_dst: NodeLabel,
    },

    #[error("graph is sealed; no further mutation is allowed")]
    SealedGraph,
}
