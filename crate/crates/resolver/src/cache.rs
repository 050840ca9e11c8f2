//! Append-only resolution cache: one `kind<TAB>value<TAB>paper_id<TAB>unix_ts`
//! record per line.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::id::{ExternalId, IdKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub paper_id: String,
    pub fetched_at: u64,
}

#[derive(Debug, Default)]
pub struct ResolutionCache {
    entries: HashMap<ExternalId, CacheEntry>,
    file: Option<(PathBuf, File)>,
    /// Lines skipped while loading because they did not parse.
    pub skipped_lines: usize,
}

pub fn is_paper_id(s: &str) -> bool {
    s.len() == 40 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

impl ResolutionCache {
    /// A cache that lives only in memory.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) the cache file and replays its records.
    /// Later records for the same id win.
    pub fn open(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut cache = Self::default();
        if path.exists() {
            for line in std::fs::read_to_string(path)?.lines() {
                match parse_record(line) {
                    Some((id, entry)) => {
                        cache.entries.insert(id, entry);
                    }
                    None if line.trim().is_empty() => {}
                    None => cache.skipped_lines += 1,
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        cache.file = Some((path.to_owned(), file));
        Ok(cache)
    }

    pub fn path(&self) -> Option<&Path> {
        self.file.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn get(&self, id: &ExternalId) -> Option<&CacheEntry> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, id: ExternalId, entry: CacheEntry) -> std::io::Result<()> {
        if let Some((_, file)) = &mut self.file {
            let line = format!("{}\t{}\t{}\t{}\n", id.kind().as_str(), id.value(), entry.paper_id, entry.fetched_at);
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        self.entries.insert(id, entry);
        Ok(())
    }
}

fn parse_record(line: &str) -> Option<(ExternalId, CacheEntry)> {
    let mut parts = line.split('\t');
    let kind: IdKind = parts.next()?.parse().ok()?;
    let id = ExternalId::new(kind, parts.next()?).ok()?;
    let paper_id = parts.next()?;
    let fetched_at = parts.next()?.parse().ok()?;
    if parts.next().is_some() || !is_paper_id(paper_id) {
        return None;
    }
    Some((id, CacheEntry { paper_id: paper_id.to_owned(), fetched_at }))
}
