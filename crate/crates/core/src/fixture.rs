//! The small canonical graph used across the test suites.
//!
//! Four authors on a collaboration chain (Swayamdipta - Zettlemoyer -
//! Barzilay) plus an unconnected Ellis, three papers, five entities, two
//! venues and one coded relation instance `Causes[Smoking, Cancer]`. The
//! CSV copy under `fixtures/fixture-a/` must build to exactly this graph.

use crate::graph::{NodeId, PropertyGraph};
use crate::props;
use crate::schema::{EdgeLabel, NodeLabel, DEFAULT_INDEXES};

/// Paper id of `P1`, the id the scholarly API returns for DOI 10.1038/nrn3241.
pub const P1_PAPER_ID: &str = "931d6b6ee097eab80b8f89a313c8d3a6d5443cb2";
pub const P2_PAPER_ID: &str = "2222222222222222222222222222222222222222";
pub const P3_PAPER_ID: &str = "3333333333333333333333333333333333333333";

#[derive(Debug, Clone, Copy)]
pub struct FixtureIds {
    pub p1: NodeId,
    pub p2: NodeId,
    pub p3: NodeId,
    pub a1: NodeId,
    pub a2: NodeId,
    pub a3: NodeId,
    pub a4: NodeId,
    pub e1: NodeId,
    pub e2: NodeId,
    pub e3: NodeId,
    pub e4: NodeId,
    pub e5: NodeId,
    pub v1: NodeId,
    pub v2: NodeId,
    pub r1: NodeId,
    pub ri1: NodeId,
}

/// Builds the fixture graph, unsealed, without indexes.
pub fn fixture_a_unsealed() -> (PropertyGraph, FixtureIds) {
    use EdgeLabel::*;
    use NodeLabel::*;
    let mut g = PropertyGraph::new();
    let mut node = |label, props| g.add_node(label, props).expect("fixture build");

    let p1 = node(Paper, props! {"paper_id" => P1_PAPER_ID, "title" => "T1", "year" => 2017_i64});
    let p2 = node(Paper, props! {"paper_id" => P2_PAPER_ID, "title" => "T2", "year" => 2016_i64});
    let p3 = node(
        Paper,
        props! {"paper_id" => P3_PAPER_ID, "title" => "One-shot learning of object categories", "year" => 2006_i64},
    );
    let a1 = node(Author, props! {"author_id" => 2705113_i64, "first" => "Swabha", "last" => "Swayamdipta"});
    let a2 = node(Author, props! {"first" => "Luke", "last" => "Zettlemoyer"});
    let a3 = node(Author, props! {"first" => "Regina", "last" => "Barzilay"});
    let a4 = node(Author, props! {"first" => "Clarence", "last" => "Ellis"});
    let e1 = node(Entity, props! {"name" => "Relationship extraction"});
    let e2 = node(Entity, props! {"name" => "Natural language processing"});
    let e3 = node(Entity, props! {"name" => "Constraint programming"});
    let e4 = node(Entity, props! {"name" => "Smoking"});
    let e5 = node(Entity, props! {"name" => "Cancer"});
    let v1 = node(Venue, props! {"text" => "NAACL 2018"});
    let v2 = node(Venue, props! {"text" => "CVPR 2017"});
    let r1 = node(Relation, props! {"name" => "Causes"});
    let ri1 = node(RelationInstance, props! {});

    let mut edge = |src, label, dst, props| {
        g.add_edge(src, label, dst, props).expect("fixture build");
    };
    edge(p1, Cites, p2, props! {});
    for (a, p) in [(a1, p1), (a2, p1), (a2, p2), (a3, p2), (a4, p3)] {
        edge(a, Authors, p, props! {});
    }
    for (p, e) in [(p1, e1), (p1, e2), (p1, e3), (p2, e1)] {
        edge(p, Mentions, e, props! {});
    }
    edge(p1, AppearsIn, v1, props! {});
    edge(p2, AppearsIn, v2, props! {});
    edge(p1, MentionsRelation, ri1, props! {});
    edge(ri1, WithEntity, e4, props! {"position" => 0_i64});
    edge(ri1, WithEntity, e5, props! {"position" => 1_i64});
    edge(ri1, WithRelationship, r1, props! {});

    let ids = FixtureIds { p1, p2, p3, a1, a2, a3, a4, e1, e2, e3, e4, e5, v1, v2, r1, ri1 };
    (g, ids)
}

/// The fixture graph, with the default indexes, sealed.
pub fn fixture_a() -> (PropertyGraph, FixtureIds) {
    let (mut g, ids) = fixture_a_unsealed();
    for (label, prop) in DEFAULT_INDEXES {
        g.create_index(*label, prop).expect("unsealed");
    }
    g.seal();
    (g, ids)
}
