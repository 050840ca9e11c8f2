//! Finding the nodes the metrics operate on.

use std::fmt;

use litgraph_core::{NodeId, NodeLabel, PropertyGraph, PropertyValue};
use regex::Regex;

use crate::MetricsError;

/// How a caller names an author.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuthorRef {
    Id(i64),
    Name { first: String, last: String },
    Node(NodeId),
}

impl AuthorRef {
    pub fn name(first: &str, last: &str) -> Self {
        AuthorRef::Name { first: first.to_owned(), last: last.to_owned() }
    }
}

impl fmt::Display for AuthorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuthorRef::Id(id) => write!(f, "author_id {id}"),
            AuthorRef::Name { first, last } => write!(f, "{first} {last}"),
            AuthorRef::Node(n) => write!(f, "node {n}"),
        }
    }
}

fn has_label(g: &PropertyGraph, n: NodeId, label: NodeLabel) -> bool {
    g.node(n).is_some_and(|node| node.label() == label)
}

pub fn find_author(g: &PropertyGraph, author: &AuthorRef) -> Result<NodeId, MetricsError> {
    let not_found = || MetricsError::AuthorNotFound(author.to_string());
    let candidates = match author {
        AuthorRef::Node(n) => return if has_label(g, *n, NodeLabel::Author) { Ok(*n) } else { Err(not_found()) },
        AuthorRef::Id(id) => g.index_lookup(NodeLabel::Author, "author_id", &PropertyValue::Integer(*id)),
        AuthorRef::Name { first, last } => {
            let by_last = g.index_lookup(NodeLabel::Author, "last", &PropertyValue::from(last.as_str()));
            let first = PropertyValue::from(first.as_str());
            by_last
                .into_iter()
                .filter(|n| g.node(*n).is_some_and(|a| a.property("first").strict_eq(&first) == Some(true)))
                .collect()
        }
    };
    match candidates.as_slice() {
        [] => Err(not_found()),
        [one] => Ok(*one),
        many => match author {
            AuthorRef::Name { first, last } => Err(MetricsError::AmbiguousName {
                first: first.clone(),
                last: last.clone(),
                count: many.len(),
                candidates: many.to_vec(),
            }),
            _ => Err(MetricsError::Undefined(format!("{author} names {} authors", many.len()))),
        },
    }
}

/// Entities whose `name` equals `name` exactly, in id order.
pub fn entities_named(g: &PropertyGraph, name: &str) -> Result<Vec<NodeId>, MetricsError> {
    let found = g.index_lookup(NodeLabel::Entity, "name", &PropertyValue::from(name));
    if found.is_empty() {
        return Err(MetricsError::EntityNotFound(name.to_owned()));
    }
    Ok(found)
}

/// Papers by their 40-hex `paper_id`.
pub fn find_paper(g: &PropertyGraph, paper_id: &str) -> Result<NodeId, MetricsError> {
    g.index_lookup(NodeLabel::Paper, "paper_id", &PropertyValue::from(paper_id))
        .first()
        .copied()
        .ok_or_else(|| MetricsError::PaperNotFound(paper_id.to_owned()))
}

pub fn paper_node(g: &PropertyGraph, paper: NodeId) -> Result<NodeId, MetricsError> {
    if has_label(g, paper, NodeLabel::Paper) {
        Ok(paper)
    } else {
        Err(MetricsError::PaperNotFound(paper.to_string()))
    }
}

/// Compiles `pattern` so that it must match a whole string.
pub fn whole_string_regex(pattern: &str) -> Result<Regex, MetricsError> {
    Regex::new(&format!("^(?:{pattern})$")).map_err(|e| MetricsError::BadPattern(e.to_string()))
}

pub(crate) fn text_matches(re: &Regex, v: &PropertyValue) -> bool {
    v.as_text().is_some_and(|s| re.is_match(s))
}
