//! Parsing one CSV shard into typed, staged rows.

use std::path::{Path, PathBuf};

use litgraph_core::{PropertyMap, PropertyValue};
use serde::Serialize;

use crate::error::IngestError;
use crate::manifest::{ColumnSpec, ColumnType, EdgeSection, NodeSection};

/// The section a shard belongs to.
#[derive(Debug, Clone, Copy)]
pub enum SectionSpec<'a> {
    Node(&'a NodeSection),
    Edge(&'a EdgeSection),
}

impl SectionSpec<'_> {
    pub fn name(&self) -> String {
        match self {
            SectionSpec::Node(s) => s.label.to_string(),
            SectionSpec::Edge(s) => s.label.to_string(),
        }
    }

    fn expected_header(&self) -> Vec<String> {
        match self {
            SectionSpec::Node(s) => s.expected_header(),
            SectionSpec::Edge(s) => s.expected_header(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    WrongArity,
    BadValue,
    MissingId,
    Malformed,
    DuplicateId,
    DanglingRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// 1-based line in the shard where the row starts.
    pub line: u64,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StagedRow {
    pub line: u64,
    /// External id of a node row, or source id of an edge row.
    pub key: String,
    /// Destination id of an edge row.
    pub dst: Option<String>,
    pub props: PropertyMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StagedShard {
    pub file: PathBuf,
    pub rows: Vec<StagedRow>,
    pub rejected: Vec<Rejection>,
    /// Data rows read, accepted or not.
    pub total_rows: u64,
}

fn parse_cell(raw: &str, ty: ColumnType) -> Option<PropertyValue> {
    Some(match ty {
        ColumnType::String => PropertyValue::Text(raw.to_owned()),
        ColumnType::Int => PropertyValue::Integer(raw.parse().ok()?),
        ColumnType::Float => PropertyValue::Real(raw.parse().ok()?),
        ColumnType::Boolean => match raw.to_ascii_lowercase().as_str() {
            "true" => PropertyValue::Boolean(true),
            "false" => PropertyValue::Boolean(false),
            _ => return None,
        },
    })
}

/// Reads one shard. Malformed rows are rejected with their line number;
/// only unreadable files and header mismatches are errors.
pub fn import_shard(file: &Path, section: SectionSpec<'_>) -> Result<StagedShard, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(file)
        .map_err(|source| IngestError::Csv { path: file.to_owned(), source })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|source| IngestError::Csv { path: file.to_owned(), source })?
        .iter()
        .map(str::to_owned)
        .collect();
    let expected = section.expected_header();
    let position = |name: &str| header.iter().position(|h| h == name);
    let mut sorted_header = header.clone();
    sorted_header.sort();
    let mut sorted_expected = expected.clone();
    sorted_expected.sort();
    if sorted_header != sorted_expected {
        return Err(IngestError::HeaderMismatch { file: file.to_owned(), expected, found: header });
    }

    let (key_col, dst_col, id_property, columns) = match section {
        SectionSpec::Node(s) => (position(&s.id_column), None, s.id_property.as_ref(), &s.columns),
        SectionSpec::Edge(s) => (position(&s.src_column), position(&s.dst_column), None, &s.columns),
    };
    let key_col = key_col.expect("header checked");
    let typed: Vec<(&ColumnSpec, usize)> =
        columns.iter().map(|c| (c, position(&c.header()).expect("header checked"))).collect();

    let mut shard = StagedShard { file: file.to_owned(), rows: Vec::new(), rejected: Vec::new(), total_rows: 0 };
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => {
                return Err(IngestError::Csv { path: file.to_owned(), source: e });
            }
            Err(e) => {
                shard.total_rows += 1;
                let line = e.position().map_or(line, |p| p.line());
                shard.rejected.push(Rejection { line, reason: RejectReason::Malformed, detail: e.to_string() });
                continue;
            }
        }
        shard.total_rows += 1;
        let line = record.position().map_or(line, |p| p.line());
        let reject = |reason, detail: String| Rejection { line, reason, detail };
        if record.len() != header.len() {
            let detail = format!("expected {} fields, found {}", header.len(), record.len());
            shard.rejected.push(reject(RejectReason::WrongArity, detail));
            continue;
        }
        match stage_row(&record, line, key_col, dst_col, id_property, &typed) {
            Ok(row) => shard.rows.push(row),
            Err((reason, detail)) => shard.rejected.push(reject(reason, detail)),
        }
    }
    Ok(shard)
}

fn stage_row(
    record: &csv::StringRecord,
    line: u64,
    key_col: usize,
    dst_col: Option<usize>,
    id_property: Option<&ColumnSpec>,
    typed: &[(&ColumnSpec, usize)],
) -> Result<StagedRow, (RejectReason, String)> {
    let key = &record[key_col];
    if key.is_empty() {
        return Err((RejectReason::MissingId, "empty id".into()));
    }
    let dst = match dst_col {
        Some(c) if record[c].is_empty() => return Err((RejectReason::MissingId, "empty destination id".into())),
        Some(c) => Some(record[c].to_owned()),
        None => None,
    };
    let mut props = PropertyMap::new();
    if let Some(spec) = id_property {
        let v = parse_cell(key, spec.ty)
            .ok_or_else(|| (RejectReason::BadValue, format!("id `{key}` is not a valid {}", spec.ty)))?;
        props.insert(spec.name.clone(), v);
    }
    for (spec, col) in typed {
        let raw = &record[*col];
        if raw.is_empty() {
            continue;
        }
        let v = parse_cell(raw, spec.ty)
            .ok_or_else(|| (RejectReason::BadValue, format!("`{raw}` is not a valid {} for {}", spec.ty, spec.name)))?;
        props.insert(spec.name.clone(), v);
    }
    Ok(StagedRow { line, key: key.to_owned(), dst, props })
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use litgraph_core::NodeLabel;

    use super::*;

    fn paper_section() -> NodeSection {
        NodeSection {
            label: NodeLabel::Paper,
            files: vec![],
            id_column: "id".into(),
            id_property: Some("paper_id:string".parse().unwrap()),
            columns: vec!["year:int".parse().unwrap(), "title:string".parse().unwrap()],
        }
    }

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn bad_rows_are_rejected_not_fatal() {
        let f = write("id,year:int,title:string\nP1,2017,T1\nP2,2016,\"T, two\"\nP9,notayear,x\nP3,2006,T3\n");
        let s = import_shard(f.path(), SectionSpec::Node(&paper_section())).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert_eq!(s.total_rows, 4);
        assert_eq!(s.rejected.len(), 1);
        assert_eq!(s.rejected[0].line, 4);
        assert_eq!(s.rejected[0].reason, RejectReason::BadValue);
        assert_eq!(s.rows[1].props["title"], PropertyValue::Text("T, two".into()));
        assert_eq!(s.rows[0].props["paper_id"], PropertyValue::Text("P1".into()));
        assert_eq!(s.rows[0].props["year"], PropertyValue::Integer(2017));
    }

    #[test]
    fn columns_may_come_in_any_order_and_empty_cells_are_absent() {
        let f = write("title:string,id,year:int\nT1,P1,\n");
        let s = import_shard(f.path(), SectionSpec::Node(&paper_section())).unwrap();
        assert_eq!(s.rows[0].key, "P1");
        assert!(!s.rows[0].props.contains_key("year"));
    }

    #[test]
    fn arity_and_missing_ids() {
        let f = write("id,year:int,title:string\nP1,2017\n,2016,T\nP2,2016,T,extra\n");
        let s = import_shard(f.path(), SectionSpec::Node(&paper_section())).unwrap();
        let reasons: Vec<_> = s.rejected.iter().map(|r| (r.line, r.reason)).collect();
        assert_eq!(
            reasons,
            vec![(2, RejectReason::WrongArity), (3, RejectReason::MissingId), (4, RejectReason::WrongArity)]
        );
    }

    #[test]
    fn header_must_match() {
        let f = write("id,year:string,title:string\n");
        assert!(matches!(
            import_shard(f.path(), SectionSpec::Node(&paper_section())),
            Err(IngestError::HeaderMismatch { .. })
        ));
        let empty = write("id,year:int,title:string\n");
        let s = import_shard(empty.path(), SectionSpec::Node(&paper_section())).unwrap();
        assert_eq!((s.rows.len(), s.rejected.len(), s.total_rows), (0, 0, 0));
    }

    #[test]
    fn duplicates_are_staged() {
        let f = write("id,year:int,title:string\nP1,2017,A\nP1,2018,B\n");
        let s = import_shard(f.path(), SectionSpec::Node(&paper_section())).unwrap();
        assert_eq!(s.rows.len(), 2);
    }

    #[test]
    fn typed_cells() {
        assert_eq!(parse_cell("TRUE", ColumnType::Boolean), Some(PropertyValue::Boolean(true)));
        assert_eq!(parse_cell("1.5", ColumnType::Float), Some(PropertyValue::Real(1.5)));
        assert_eq!(parse_cell("1.5", ColumnType::Int), None);
        assert_eq!(parse_cell("yes", ColumnType::Boolean), None);
    }
}
