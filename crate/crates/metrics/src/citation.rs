//! Citation-count metrics.

use std::collections::BTreeSet;

use litgraph_core::{Direction, EdgeLabel, NodeId, NodeLabel, PropertyGraph};

use crate::lookup::{find_author, paper_node, AuthorRef};
use crate::MetricsError;

/// Distinct papers the author wrote.
pub fn papers_of(g: &PropertyGraph, author: NodeId) -> Vec<NodeId> {
    let papers: BTreeSet<NodeId> = g
        .neighbors_iter(author, Some(EdgeLabel::Authors), Direction::Outgoing)
        .into_iter()
        .flatten()
        .map(|(_, p)| p)
        .collect();
    papers.into_iter().collect()
}

/// Number of CITES edges pointing at `paper`.
pub fn citation_count(g: &PropertyGraph, paper: NodeId) -> usize {
    g.neighbors_iter(paper, Some(EdgeLabel::Cites), Direction::Incoming).map_or(0, Iterator::count)
}

/// Citation counts of the author's papers, highest first.
pub fn author_citation_counts(g: &PropertyGraph, author: &AuthorRef) -> Result<Vec<usize>, MetricsError> {
    let a = find_author(g, author)?;
    let mut counts: Vec<usize> = papers_of(g, a).into_iter().map(|p| citation_count(g, p)).collect();
    counts.sort_unstable_by(|x, y| y.cmp(x));
    Ok(counts)
}

/// Largest `h` such that `h` of the counts are at least `h`.
pub fn h_index_of(counts: &[usize]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    sorted.iter().enumerate().take_while(|&(i, &c)| c > i).count()
}

pub fn i10_index_of(counts: &[usize]) -> usize {
    counts.iter().filter(|&&c| c >= 10).count()
}

pub fn h_index(g: &PropertyGraph, author: &AuthorRef) -> Result<usize, MetricsError> {
    Ok(h_index_of(&author_citation_counts(g, author)?))
}

pub fn i10_index(g: &PropertyGraph, author: &AuthorRef) -> Result<usize, MetricsError> {
    Ok(i10_index_of(&author_citation_counts(g, author)?))
}

/// The terms of the CD index: `(Σ f(q) − 2·f(q)·b(q), |S|)`.
pub fn cd_index_terms(g: &PropertyGraph, paper: NodeId) -> Result<(i64, usize), MetricsError> {
    let focal = paper_node(g, paper)?;
    let cites = |q: NodeId| -> BTreeSet<NodeId> {
        g.neighbors_iter(q, Some(EdgeLabel::Cites), Direction::Outgoing).into_iter().flatten().map(|(_, p)| p).collect()
    };
    let cited_by = |p: NodeId| {
        g.neighbors_iter(p, Some(EdgeLabel::Cites), Direction::Incoming).into_iter().flatten().map(|(_, q)| q)
    };
    let references = cites(focal);
    let mut citers: BTreeSet<NodeId> = cited_by(focal).collect();
    for &r in &references {
        citers.extend(cited_by(r));
    }
    citers.remove(&focal);
    citers.retain(|&q| g.node(q).is_some_and(|n| n.label() == NodeLabel::Paper));

    let mut sum = 0;
    for &q in &citers {
        let out = cites(q);
        let f = i64::from(out.contains(&focal));
        let b = i64::from(out.iter().any(|p| references.contains(p)));
        sum += f - 2 * f * b;
    }
    Ok((sum, citers.len()))
}

/// Disruption of `paper`: +1 when later work cites it instead of its
/// references, −1 when later work cites both. No time window is applied.
pub fn cd_index(g: &PropertyGraph, paper: NodeId) -> Result<f64, MetricsError> {
    match cd_index_terms(g, paper)? {
        (_, 0) => Err(MetricsError::Undefined(format!("no paper cites {paper} or its references"))),
        (sum, n) => Ok(sum as f64 / n as f64),
    }
}
