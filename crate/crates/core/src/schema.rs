//! The closed set of node and edge labels and the edge signatures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeLabel {
    Paper,
    Author,
    Entity,
    Venue,
    Affiliation,
    Relation,
    RelationInstance,
}

impl NodeLabel {
    pub const ALL: [NodeLabel; 7] = [
        NodeLabel::Paper,
        NodeLabel::Author,
        NodeLabel::Entity,
        NodeLabel::Venue,
        NodeLabel::Affiliation,
        NodeLabel::Relation,
        NodeLabel::RelationInstance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeLabel::Paper => "Paper",
            NodeLabel::Author => "Author",
            NodeLabel::Entity => "Entity",
            NodeLabel::Venue => "Venue",
            NodeLabel::Affiliation => "Affiliation",
            NodeLabel::Relation => "Relation",
            NodeLabel::RelationInstance => "RelationInstance",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeLabel {
    Cites,
    Authors,
    Mentions,
    AppearsIn,
    AffiliatedWith,
    MentionsRelation,
    WithEntity,
    WithRelationship,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 8] = [
        EdgeLabel::Cites,
        EdgeLabel::Authors,
        EdgeLabel::Mentions,
        EdgeLabel::AppearsIn,
        EdgeLabel::AffiliatedWith,
        EdgeLabel::MentionsRelation,
        EdgeLabel::WithEntity,
        EdgeLabel::WithRelationship,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Cites => "CITES",
            EdgeLabel::Authors => "AUTHORS",
            EdgeLabel::Mentions => "MENTIONS",
            EdgeLabel::AppearsIn => "APPEARS_IN",
            EdgeLabel::AffiliatedWith => "AFFILIATED_WITH",
            EdgeLabel::MentionsRelation => "MENTIONS_RELATION",
            EdgeLabel::WithEntity => "WITH_ENTITY",
            EdgeLabel::WithRelationship => "WITH_RELATIONSHIP",
        }
    }

    /// The (source, destination) node labels every edge of this label must
    /// connect.
    pub fn signature(self) -> (NodeLabel, NodeLabel) {
        use NodeLabel::*;
        match self {
            EdgeLabel::Cites => (Paper, Paper),
            EdgeLabel::Authors => (Author, Paper),
            EdgeLabel::Mentions => (Paper, Entity),
            EdgeLabel::AppearsIn => (Paper, Venue),
            EdgeLabel::AffiliatedWith => (Author, Affiliation),
            EdgeLabel::MentionsRelation => (Paper, RelationInstance),
            EdgeLabel::WithEntity => (RelationInstance, Entity),
            EdgeLabel::WithRelationship => (RelationInstance, Relation),
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for NodeLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeLabel::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| UnknownLabel(s.to_owned()))
    }
}

impl FromStr for EdgeLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeLabel::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| UnknownLabel(s.to_owned()))
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Properties indexed by default: every (label, property) pair the bundled
/// example queries filter on by equality.
pub const DEFAULT_INDEXES: &[(NodeLabel, &str)] = &[
    (NodeLabel::Paper, "paper_id"),
    (NodeLabel::Paper, "title"),
    (NodeLabel::Paper, "year"),
    (NodeLabel::Author, "author_id"),
    (NodeLabel::Author, "first"),
    (NodeLabel::Author, "last"),
    (NodeLabel::Entity, "name"),
    (NodeLabel::Venue, "text"),
];
