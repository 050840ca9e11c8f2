use std::path::Path;

use serde::{Deserialize, Serialize};

const BUNDLED: &str = include_str!("../../../fixtures/examples.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleEntry {
    pub slug: String,
    pub title: String,
    pub statement: String,
    pub description: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ExamplesError {
    #[error("cannot read examples: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid examples file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate example slug `{0}`")]
    DuplicateSlug(String),
}

pub fn parse_examples(text: &str) -> Result<Vec<ExampleEntry>, ExamplesError> {
    let entries: Vec<ExampleEntry> = serde_json::from_str(text)?;
    let mut seen = std::collections::HashSet::new();
    for e in &entries {
        if !seen.insert(e.slug.as_str()) {
            return Err(ExamplesError::DuplicateSlug(e.slug.clone()));
        }
    }
    Ok(entries)
}

pub fn load_examples(path: &Path) -> Result<Vec<ExampleEntry>, ExamplesError> {
    parse_examples(&std::fs::read_to_string(path)?)
}

/// The example queries shipped with the crate.
pub fn bundled_examples() -> Vec<ExampleEntry> {
    parse_examples(BUNDLED).expect("bundled examples are valid")
}
