//! Property values stored on nodes and edges.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A single property literal.
///
/// Equality in the query sense is type-strict and null-aware; see
/// [`PropertyValue::strict_eq`]. The derived `PartialEq` is structural and is
/// meant for tests and AST comparison, not for query evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Text(String),
    Integer(i64),
    Real(f64),
    Boolean(bool),
    Null,
}

impl PropertyValue {
    pub fn is_null(&self) -> bool {
        matches!(self, PropertyValue::Null)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            PropertyValue::Text(_) => "text",
            PropertyValue::Integer(_) => "integer",
            PropertyValue::Real(_) => "real",
            PropertyValue::Boolean(_) => "boolean",
            PropertyValue::Null => "null",
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            PropertyValue::Integer(i) => Some(*i),
            _ => None,
        }
    }

    /// Query-language equality. `None` means unknown (either side null);
    /// values of different types are never equal.
    pub fn strict_eq(&self, other: &PropertyValue) -> Option<bool> {
        use PropertyValue::*;
        match (self, other) {
            (Null, _) | (_, Null) => None,
            (Text(a), Text(b)) => Some(a == b),
            (Integer(a), Integer(b)) => Some(a == b),
            (Real(a), Real(b)) => Some(a == b),
            (Boolean(a), Boolean(b)) => Some(a == b),
            _ => Some(false),
        }
    }

    /// Ordering between two values of the same type. Null, mixed types and
    /// NaN are incomparable.
    pub fn compare(&self, other: &PropertyValue) -> Option<Ordering> {
        use PropertyValue::*;
        match (self, other) {
            (Text(a), Text(b)) => Some(a.cmp(b)),
            (Integer(a), Integer(b)) => Some(a.cmp(b)),
            (Real(a), Real(b)) => a.partial_cmp(b),
            (Boolean(a), Boolean(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Total order used for sorting result rows: booleans, integers, reals,
    /// text, then null.
    pub fn total_cmp(&self, other: &PropertyValue) -> Ordering {
        use PropertyValue::*;
        fn rank(v: &PropertyValue) -> u8 {
            match v {
                Boolean(_) => 0,
                Integer(_) => 1,
                Real(_) => 2,
                Text(_) => 3,
                Null => 4,
            }
        }
        match (self, other) {
            (Text(a), Text(b)) => a.cmp(b),
            (Integer(a), Integer(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Boolean(a), Boolean(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }

    /// Hashable key for exact-match indexes. Null and NaN have no key since
    /// they never compare equal to anything.
    pub fn index_key(&self) -> Option<IndexKey> {
        match self {
            PropertyValue::Text(s) => Some(IndexKey::Text(s.clone())),
            PropertyValue::Integer(i) => Some(IndexKey::Integer(*i)),
            PropertyValue::Real(f) if f.is_nan() => None,
            // -0.0 == 0.0, so both map to the same key
            PropertyValue::Real(f) => Some(IndexKey::Real(if *f == 0.0 { 0 } else { f.to_bits() })),
            PropertyValue::Boolean(b) => Some(IndexKey::Boolean(*b)),
            PropertyValue::Null => None,
        }
    }
}

/// Hashable projection of a non-null [`PropertyValue`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexKey {
    Text(String),
    Integer(i64),
    Real(u64),
    Boolean(bool),
}

pub(crate) fn write_escaped(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Text(s) => write_escaped(f, s),
            PropertyValue::Integer(i) => write!(f, "{i}"),
            PropertyValue::Real(x) => write!(f, "{x:?}"),
            PropertyValue::Boolean(b) => write!(f, "{b}"),
            PropertyValue::Null => f.write_str("null"),
        }
    }
}

impl Serialize for PropertyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            PropertyValue::Text(s) => serializer.serialize_str(s),
            PropertyValue::Integer(i) => serializer.serialize_i64(*i),
            PropertyValue::Real(x) if x.is_finite() => serializer.serialize_f64(*x),
            PropertyValue::Real(_) | PropertyValue::Null => serializer.serialize_unit(),
            PropertyValue::Boolean(b) => serializer.serialize_bool(*b),
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_owned())
    }
}

impl From<String> for PropertyValue {
    fn from(s: String) -> Self {
        PropertyValue::Text(s)
    }
}

impl From<i64> for PropertyValue {
    fn from(i: i64) -> Self {
        PropertyValue::Integer(i)
    }
}

impl From<f64> for PropertyValue {
    fn from(x: f64) -> Self {
        PropertyValue::Real(x)
    }
}

impl From<bool> for PropertyValue {
    fn from(b: bool) -> Self {
        PropertyValue::Boolean(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_type_strict() {
        let year = PropertyValue::Integer(2013);
        let text = PropertyValue::from("2013");
        assert_eq!(year.strict_eq(&text), Some(false));
        assert_eq!(year.strict_eq(&PropertyValue::Integer(2013)), Some(true));
        assert_eq!(PropertyValue::Integer(2).strict_eq(&PropertyValue::Real(2.0)), Some(false));
    }

    #[test]
    fn null_equals_nothing() {
        let null = PropertyValue::Null;
        assert_eq!(null.strict_eq(&PropertyValue::Null), None);
        assert_eq!(null.strict_eq(&PropertyValue::Integer(1)), None);
        assert_eq!(PropertyValue::from("x").strict_eq(&null), None);
        assert!(null.index_key().is_none());
    }

    #[test]
    fn zero_signs_share_an_index_key() {
        assert_eq!(PropertyValue::Real(0.0).index_key(), PropertyValue::Real(-0.0).index_key());
        assert!(PropertyValue::Real(f64::NAN).index_key().is_none());
    }

    #[test]
    fn display_escapes_text() {
        assert_eq!(PropertyValue::from("a\"b\n").to_string(), r#""a\"b\n""#);
        assert_eq!(PropertyValue::Real(2.0).to_string(), "2.0");
    }
}
