//! Embedded property graph for scholarly literature.
//!
//! Seven node labels (papers, authors, entities, venues, affiliations,
//! relations and relation instances) connected by eight typed edge labels,
//! each with a fixed endpoint signature. Graphs are built single-threaded,
//! sealed, and then served read-only.

pub mod error;
pub mod fixture;
pub mod graph;
pub mod path;
pub mod schema;
pub mod value;

pub use error::GraphError;
pub use graph::{Direction, Edge, EdgeId, GraphCounts, Node, NodeId, PropertyGraph, PropertyMap};
pub use path::Path;
pub use schema::{EdgeLabel, NodeLabel, UnknownLabel, DEFAULT_INDEXES};
pub use value::{IndexKey, PropertyValue};
