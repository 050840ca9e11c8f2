use litgraph_core::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("author not found: {0}")]
    AuthorNotFound(String),
    #[error("{count} authors are named {first} {last}; select one by author_id")]
    AmbiguousName { first: String, last: String, count: usize, candidates: Vec<NodeId> },
    #[error("entity not found: {0}")]
    EntityNotFound(String),
    #[error("paper not found: {0}")]
    PaperNotFound(String),
    #[error("invalid pattern: {0}")]
    BadPattern(String),
    #[error("no path between {from} and {to}")]
    NoPath { from: String, to: String },
    #[error("{0}")]
    Undefined(String),
}
