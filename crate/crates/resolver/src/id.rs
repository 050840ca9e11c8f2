use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;

static DOI: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^10\.\d{4,9}/\S+$").expect("valid pattern"));
static ARXIV: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:\d{4}\.\d{4,5}(?:v\d+)?|[a-z-]+(?:\.[A-Z]{2})?/\d{7})$").expect("valid pattern"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdKind {
    Doi,
    Arxiv,
}

impl IdKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IdKind::Doi => "doi",
            IdKind::Arxiv => "arxiv",
        }
    }
}

impl FromStr for IdKind {
    type Err = InvalidId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "doi" => Ok(IdKind::Doi),
            "arxiv" => Ok(IdKind::Arxiv),
            _ => Err(InvalidId(format!("unknown id kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InvalidId(pub String);

/// A DOI or arXiv identifier, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExternalId {
    kind: IdKind,
    value: String,
}

impl ExternalId {
    pub fn new(kind: IdKind, value: &str) -> Result<Self, InvalidId> {
        let value = value.trim();
        let ok = match kind {
            IdKind::Doi => DOI.is_match(value),
            IdKind::Arxiv => ARXIV.is_match(value),
        };
        if !ok {
            return Err(InvalidId(format!("`{value}` is not a valid {}", kind.as_str())));
        }
        Ok(ExternalId { kind, value: value.to_owned() })
    }

    pub fn doi(value: &str) -> Result<Self, InvalidId> {
        Self::new(IdKind::Doi, value)
    }

    pub fn arxiv(value: &str) -> Result<Self, InvalidId> {
        Self::new(IdKind::Arxiv, value)
    }

    pub fn kind(&self) -> IdKind {
        self.kind
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    /// The path segment the upstream API expects.
    pub fn request_key(&self) -> String {
        match self.kind {
            IdKind::Doi => self.value.clone(),
            IdKind::Arxiv => format!("arXiv:{}", self.value),
        }
    }
}

/// Accepts `doi:…` / `arxiv:…` prefixes, or a bare value whose kind is
/// inferred from its shape.
impl FromStr for ExternalId {
    type Err = InvalidId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((prefix, rest)) = s.split_once(':') {
            if let Ok(kind) = prefix.parse::<IdKind>() {
                return Self::new(kind, rest);
            }
        }
        Self::doi(s)
            .or_else(|_| Self::arxiv(s))
            .map_err(|_| InvalidId(format!("`{s}` is neither a DOI nor an arXiv id")))
    }
}

impl fmt::Display for ExternalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.value)
    }
}
