//! Small random scholarly graphs whose names collide often enough to
//! exercise duplicate handling.

#![allow(dead_code)]

use litgraph_core::schema::DEFAULT_INDEXES;
use litgraph_core::{props, EdgeLabel, NodeId, NodeLabel, PropertyGraph, PropertyMap, PropertyValue};
use rand::seq::SliceRandom;
use rand::Rng;

pub const FIRST: &[&str] = &["Ann", "Bo", "Cy", "Di"];
pub const LAST: &[&str] = &["Lee", "Kim", "Ng"];
pub const ENTITIES: &[&str] = &["Smoking", "Cancer", "NLP", "Parsing", "Vision"];
pub const VENUES: &[&str] = &["NAACL 2018", "CVPR 2017", "ACL 2019", "EMNLP"];

fn pick<R: Rng>(rng: &mut R, ids: &[NodeId]) -> Option<NodeId> {
    ids.choose(rng).copied()
}

fn add_nodes(g: &mut PropertyGraph, label: NodeLabel, props: Vec<PropertyMap>) -> Vec<NodeId> {
    props.into_iter().map(|p| g.add_node(label, p).unwrap()).collect()
}

/// Random sealed graph following the edge signatures.
pub fn scholarly_graph<R: Rng>(rng: &mut R) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    for (label, prop) in DEFAULT_INDEXES {
        if rng.gen_bool(0.5) {
            g.create_index(*label, prop).unwrap();
        }
    }
    let n_papers = rng.gen_range(3..30);
    let papers = add_nodes(
        &mut g,
        NodeLabel::Paper,
        (0..n_papers)
            .map(|i| {
                if rng.gen_bool(0.9) {
                    props! {"title" => format!("T{i}"), "year" => rng.gen_range(2010..=2020_i64)}
                } else {
                    props! {"title" => format!("T{i}")}
                }
            })
            .collect(),
    );
    let authors = add_nodes(&mut g, NodeLabel::Author, (0..rng.gen_range(2..10)).map(|i| {
        props! {"author_id" => i as i64 + 1, "first" => *FIRST.choose(rng).unwrap(), "last" => *LAST.choose(rng).unwrap()}
    }).collect());
    let entities = add_nodes(
        &mut g,
        NodeLabel::Entity,
        (0..rng.gen_range(1..8))
            .map(|_| {
                props! {"name" => *ENTITIES.choose(rng).unwrap()}
            })
            .collect(),
    );
    let venues = add_nodes(
        &mut g,
        NodeLabel::Venue,
        (0..rng.gen_range(1..5))
            .map(|_| {
                props! {"text" => *VENUES.choose(rng).unwrap()}
            })
            .collect(),
    );
    let relations = add_nodes(
        &mut g,
        NodeLabel::Relation,
        (0..rng.gen_range(1..3)).map(|i| props! {"name" => format!("R{i}")}).collect(),
    );
    let instances = add_nodes(&mut g, NodeLabel::RelationInstance, vec![PropertyMap::new(); rng.gen_range(0..6)]);

    let endpoints = |label: NodeLabel| match label {
        NodeLabel::Paper => &papers,
        NodeLabel::Author => &authors,
        NodeLabel::Entity => &entities,
        NodeLabel::Venue => &venues,
        NodeLabel::Relation => &relations,
        NodeLabel::RelationInstance => &instances,
        NodeLabel::Affiliation => unreachable!(),
    };
    for label in EdgeLabel::ALL {
        if label == EdgeLabel::AffiliatedWith {
            continue;
        }
        let (s, d) = label.signature();
        let n = rng.gen_range(0..=2 * papers.len());
        for _ in 0..n {
            let (Some(src), Some(dst)) = (pick(rng, endpoints(s)), pick(rng, endpoints(d))) else { continue };
            let props = if label == EdgeLabel::WithEntity {
                match rng.gen_range(0..10) {
                    0 => PropertyMap::new(),
                    k => props! {"position" => i64::from(k % 2)},
                }
            } else {
                PropertyMap::new()
            };
            g.add_edge(src, label, dst, props).unwrap();
        }
    }
    g.seal();
    g
}

/// Random citation DAG over `n` papers: edges only go from newer (higher
/// id) to older papers.
pub fn citation_dag<R: Rng>(rng: &mut R, n: usize, density: f64) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let papers: Vec<NodeId> =
        (0..n).map(|i| g.add_node(NodeLabel::Paper, props! {"title" => format!("T{i}")}).unwrap()).collect();
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(density) {
                g.add_edge(papers[i], EdgeLabel::Cites, papers[j], PropertyMap::new()).unwrap();
            }
        }
    }
    g.sealed()
}

pub fn text(g: &PropertyGraph, n: NodeId, key: &str) -> Option<String> {
    match g.node(n).unwrap().property(key) {
        PropertyValue::Text(s) => Some(s.clone()),
        _ => None,
    }
}
