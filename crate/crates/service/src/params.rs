//! Textual `$name` substitution ahead of parsing. Values are rendered as
//! query literals, so strings are always escaped and never spliced raw.

use std::collections::{BTreeMap, BTreeSet};

use litgraph_cypher::ast::Literal;
use serde_json::Value as Json;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("parameter `${0}` has no value")]
    Missing(String),
    #[error("parameter `{0}` does not appear in the statement")]
    Unused(String),
    #[error("parameter `{0}` must be a string or an integer")]
    Unsupported(String),
}

/// The substituted text plus enough bookkeeping to map error offsets back
/// onto the original statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substituted {
    pub text: String,
    /// `(offset in text, offset in original, original length, new length)`
    spans: Vec<(usize, usize, usize, usize)>,
}

impl Substituted {
    /// Maps a byte offset in the substituted text to the original text.
    /// Offsets inside a substituted literal map to its `$`.
    pub fn original_offset(&self, offset: usize) -> usize {
        let mut shift: isize = 0;
        for &(new_at, old_at, old_len, new_len) in &self.spans {
            if offset < new_at {
                break;
            }
            if offset < new_at + new_len {
                return old_at;
            }
            shift += new_len as isize - old_len as isize;
        }
        (offset as isize - shift).max(0) as usize
    }
}

fn literal(name: &str, value: &Json) -> Result<String, ParamError> {
    match value {
        Json::String(s) => Ok(Literal::Text(s.clone()).to_string()),
        Json::Number(n) => {
            n.as_i64().map(|i| Literal::Integer(i).to_string()).ok_or_else(|| ParamError::Unsupported(name.into()))
        }
        _ => Err(ParamError::Unsupported(name.into())),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Replaces every `$name` outside string literals and comments. Every
/// placeholder needs a value and every value must be used.
pub fn substitute(statement: &str, params: &BTreeMap<String, Json>) -> Result<Substituted, ParamError> {
    let mut out = String::with_capacity(statement.len());
    let mut spans = Vec::new();
    let mut used = BTreeSet::new();
    let chars: Vec<(usize, char)> = statement.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        match c {
            '"' => {
                // copy the literal through its closing quote
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != '"' {
                    j += if chars[j].1 == '\\' { 2 } else { 1 };
                }
                let end = chars.get(j + 1).map_or(statement.len(), |(p, _)| *p);
                out.push_str(&statement[at..end]);
                i = j + 1;
            }
            '/' if chars.get(i + 1).is_some_and(|(_, n)| *n == '/') => {
                let mut j = i;
                while j < chars.len() && chars[j].1 != '\n' {
                    j += 1;
                }
                let end = chars.get(j).map_or(statement.len(), |(p, _)| *p);
                out.push_str(&statement[at..end]);
                i = j;
            }
            '$' if chars.get(i + 1).is_some_and(|(_, n)| is_ident_start(*n)) => {
                let mut j = i + 1;
                while j < chars.len() && is_ident(chars[j].1) {
                    j += 1;
                }
                let end = chars.get(j).map_or(statement.len(), |(p, _)| *p);
                let name = &statement[at + 1..end];
                let value = params.get(name).ok_or_else(|| ParamError::Missing(name.into()))?;
                let lit = literal(name, value)?;
                spans.push((out.len(), at, end - at, lit.len()));
                out.push_str(&lit);
                used.insert(name.to_owned());
                i = j;
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    if let Some(unused) = params.keys().find(|k| !used.contains(*k)) {
        return Err(ParamError::Unused(unused.clone()));
    }
    Ok(Substituted { text: out, spans })
}
