//! Direct graph implementations of the example queries.

use std::collections::{BTreeMap, BTreeSet};

use litgraph_core::{Direction, EdgeLabel, NodeId, NodeLabel, Path, PropertyGraph, PropertyValue};

use crate::lookup::{entities_named, find_author, text_matches, whole_string_regex, AuthorRef};
use crate::MetricsError;

pub const DEFAULT_MAX_AUTHOR_EDGES: u32 = 6;
pub const DEFAULT_MAX_RELATION_HOPS: u32 = 15;

/// Authors with their paper counts, highest first; ties by ascending node id.
pub type ExpertRanking = Vec<(NodeId, i64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationTriple {
    pub entity0: NodeId,
    pub relation: NodeId,
    pub entity1: NodeId,
}

fn out(g: &PropertyGraph, n: NodeId, label: EdgeLabel) -> impl Iterator<Item = (litgraph_core::EdgeId, NodeId)> + '_ {
    g.neighbors_iter(n, Some(label), Direction::Outgoing).into_iter().flatten()
}

fn inc(g: &PropertyGraph, n: NodeId, label: EdgeLabel) -> impl Iterator<Item = (litgraph_core::EdgeId, NodeId)> + '_ {
    g.neighbors_iter(n, Some(label), Direction::Incoming).into_iter().flatten()
}

fn is(g: &PropertyGraph, n: NodeId, label: NodeLabel) -> bool {
    g.node(n).is_some_and(|x| x.label() == label)
}

/// Shortest undirected path over AUTHORS edges with at most
/// `max_author_edges` hops.
pub fn coauthor_shortest_path(
    g: &PropertyGraph,
    a: &AuthorRef,
    b: &AuthorRef,
    max_author_edges: u32,
) -> Result<Option<Path>, MetricsError> {
    let (a, b) = (find_author(g, a)?, find_author(g, b)?);
    Ok(g.shortest_path(a, b, &[EdgeLabel::Authors], max_author_edges, Direction::Both).expect("authors exist"))
}

/// Papers per author among papers mentioning the entity named `entity`
/// whose `year` is strictly greater than `since_year`. Every matching
/// (AUTHORS, MENTIONS) edge pair counts once.
pub fn find_experts(
    g: &PropertyGraph,
    entity: &str,
    since_year: Option<i64>,
    limit: Option<usize>,
) -> Result<ExpertRanking, MetricsError> {
    let entities = entities_named(g, entity)?;
    let mut counts: BTreeMap<NodeId, i64> = BTreeMap::new();
    for e in entities {
        for (_, p) in inc(g, e, EdgeLabel::Mentions) {
            let paper = g.node(p).expect("edge endpoint");
            if paper.label() != NodeLabel::Paper {
                continue;
            }
            if let Some(since) = since_year {
                let after = paper.property("year").compare(&PropertyValue::Integer(since));
                if after != Some(std::cmp::Ordering::Greater) {
                    continue;
                }
            }
            for (_, a) in inc(g, p, EdgeLabel::Authors).filter(|(_, a)| is(g, *a, NodeLabel::Author)) {
                *counts.entry(a).or_default() += 1;
            }
        }
    }
    let mut ranking: ExpertRanking = counts.into_iter().collect();
    ranking.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    if let Some(limit) = limit {
        ranking.truncate(limit);
    }
    Ok(ranking)
}

/// Entities whose whole name matches `pattern`, in id order.
pub fn fuzzy_entity(g: &PropertyGraph, pattern: &str) -> Result<Vec<NodeId>, MetricsError> {
    let re = whole_string_regex(pattern)?;
    Ok(g.nodes_with_label(NodeLabel::Entity)
        .iter()
        .copied()
        .filter(|&e| text_matches(&re, g.node(e).expect("listed").property("name")))
        .collect())
}

/// Distinct papers that mention an entity of every given name, in id order.
pub fn papers_mentioning_all(
    g: &PropertyGraph,
    names: &[&str],
    limit: Option<usize>,
) -> Result<Vec<NodeId>, MetricsError> {
    if names.is_empty() {
        return Err(MetricsError::EntityNotFound("no entity names given".into()));
    }
    let mut result: Option<BTreeSet<NodeId>> = None;
    for name in names {
        let mentioning: BTreeSet<NodeId> = entities_named(g, name)?
            .into_iter()
            .flat_map(|e| inc(g, e, EdgeLabel::Mentions).map(|(_, p)| p))
            .filter(|&p| is(g, p, NodeLabel::Paper))
            .collect();
        result = Some(match result {
            None => mentioning,
            Some(acc) => acc.intersection(&mentioning).copied().collect(),
        });
    }
    let mut papers: Vec<NodeId> = result.unwrap_or_default().into_iter().collect();
    if let Some(limit) = limit {
        papers.truncate(limit);
    }
    Ok(papers)
}

/// Relation triples along the shortest undirected WITH_ENTITY path between
/// entities named `a` and `b`, in path order. With several entities of the
/// same name every pair is searched, in id order.
pub fn entity_relation_chain(
    g: &PropertyGraph,
    a: &str,
    b: &str,
    max_hops: u32,
) -> Result<Vec<RelationTriple>, MetricsError> {
    let (from, to) = (entities_named(g, a)?, entities_named(g, b)?);
    let mut any_path = false;
    let mut triples = Vec::new();
    for &x in &from {
        for &y in &to {
            let Some(path) =
                g.shortest_path(x, y, &[EdgeLabel::WithEntity], max_hops, Direction::Both).expect("entities exist")
            else {
                continue;
            };
            any_path = true;
            for &n in path.nodes() {
                triples.extend(instance_triples(g, n));
            }
        }
    }
    if !any_path {
        return Err(MetricsError::NoPath { from: a.to_owned(), to: b.to_owned() });
    }
    Ok(triples)
}

/// Every (position-0 entity, relation, position-1 entity) combination
/// recorded on one node.
pub fn instance_triples(g: &PropertyGraph, n: NodeId) -> Vec<RelationTriple> {
    let at = |pos: i64| -> Vec<NodeId> {
        g.neighbors_iter(n, Some(EdgeLabel::WithEntity), Direction::Outgoing)
            .into_iter()
            .flatten()
            .filter(|&(e, m)| {
                is(g, m, NodeLabel::Entity)
                    && g.edge(e).expect("listed").property("position").strict_eq(&PropertyValue::Integer(pos))
                        == Some(true)
            })
            .map(|(_, m)| m)
            .collect()
    };
    let (e0s, e1s) = (at(0), at(1));
    let relations: Vec<NodeId> =
        out(g, n, EdgeLabel::WithRelationship).map(|(_, r)| r).filter(|&r| is(g, r, NodeLabel::Relation)).collect();
    let mut triples = Vec::new();
    for &entity0 in &e0s {
        for &entity1 in &e1s {
            for &relation in &relations {
                triples.push(RelationTriple { entity0, relation, entity1 });
            }
        }
    }
    triples
}

/// Number of CITES edges from a paper in a venue matching `citing` to a
/// paper in a venue matching `cited`, counted once per pair of matching
/// APPEARS_IN edges. One APPEARS_IN edge never serves both ends.
pub fn venue_citation_count(g: &PropertyGraph, citing: &str, cited: &str) -> Result<u64, MetricsError> {
    let (citing, cited) = (whole_string_regex(citing)?, whole_string_regex(cited)?);
    let venues = |p: NodeId, re: &regex::Regex| -> Vec<litgraph_core::EdgeId> {
        out(g, p, EdgeLabel::AppearsIn)
            .filter(|&(_, v)| {
                is(g, v, NodeLabel::Venue) && text_matches(re, g.node(v).expect("endpoint").property("text"))
            })
            .map(|(e, _)| e)
            .collect()
    };
    let mut total = 0;
    for &p1 in g.nodes_with_label(NodeLabel::Paper) {
        let from = venues(p1, &citing);
        if from.is_empty() {
            continue;
        }
        for (_, p2) in out(g, p1, EdgeLabel::Cites).filter(|&(_, p2)| is(g, p2, NodeLabel::Paper)) {
            let to = venues(p2, &cited);
            total += from.iter().map(|a| to.iter().filter(|b| *b != a).count() as u64).sum::<u64>();
        }
    }
    Ok(total)
}
