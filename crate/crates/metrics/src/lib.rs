//! Typed graph algorithms for the example case studies and for citation
//! metrics (h-index, i10-index, CD index).

mod cases;
mod citation;
mod error;
mod lookup;

pub use cases::{
    coauthor_shortest_path, entity_relation_chain, find_experts, fuzzy_entity, instance_triples, papers_mentioning_all,
    venue_citation_count, ExpertRanking, RelationTriple, DEFAULT_MAX_AUTHOR_EDGES, DEFAULT_MAX_RELATION_HOPS,
};
pub use citation::{
    author_citation_counts, cd_index, cd_index_terms, citation_count, h_index, h_index_of, i10_index, i10_index_of,
    papers_of,
};
pub use error::MetricsError;
pub use lookup::{entities_named, find_author, find_paper, whole_string_regex, AuthorRef};
