//! Index scripts: one `CREATE INDEX ON :Label(property)` per line.

use std::path::Path;
use std::sync::LazyLock;

use litgraph_core::{NodeLabel, PropertyGraph};
use regex::Regex;

use crate::error::IngestError;

static CREATE_INDEX: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^CREATE\s+INDEX\s+ON\s+:\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\)\s*;?$")
        .expect("valid pattern")
});

/// Parses script text into `(label, property)` pairs. `path` is only used
/// in error messages.
pub fn parse_index_script(text: &str, path: &Path) -> Result<Vec<(NodeLabel, String)>, IngestError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| IngestError::ScriptParse { path: path.to_owned(), line: i + 1, message };
        let caps = CREATE_INDEX
            .captures(line)
            .ok_or_else(|| err(format!("expected `CREATE INDEX ON :Label(property)`, found `{line}`")))?;
        let label: NodeLabel = caps[1].parse().map_err(|e| err(format!("{e}")))?;
        out.push((label, caps[2].to_owned()));
    }
    Ok(out)
}

/// Creates every index the script names. The graph must not be sealed yet.
pub fn run_index_script(graph: &mut PropertyGraph, path: &Path) -> Result<(), IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    for (label, property) in parse_index_script(&text, path)? {
        graph.create_index(label, &property)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<(NodeLabel, String)>, IngestError> {
        parse_index_script(text, Path::new("indexes.cypher"))
    }

    #[test]
    fn accepts_comments_and_blank_lines() {
        let got = parse("// indexes\n\nCREATE INDEX ON :Entity(name)\ncreate index on :Paper( year );  // trailing\n")
            .unwrap();
        assert_eq!(got, vec![(NodeLabel::Entity, "name".into()), (NodeLabel::Paper, "year".into())]);
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn reports_the_failing_line() {
        match parse("CREATE INDEX ON :Entity(name)\nCREATE INDEX ON :Journal(name)") {
            Err(IngestError::ScriptParse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("Journal"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("DROP INDEX ON :Entity(name)"), Err(IngestError::ScriptParse { line: 1, .. })));
    }
}
