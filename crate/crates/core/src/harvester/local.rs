//! Harvested records on disk.
//!
//! `journal.jsonl` gets one JSON [`HarvestedRecord`] per line for every
//! insert or change, in arrival order. `records.json` is the compacted latest
//! state: a JSON object from identifier to record. Opening loads the
//! compacted file and replays the journal over it; [`LocalStore::compact`]
//! rewrites the compacted file and empties the journal.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::parse::HarvestedRecord;

pub const JOURNAL_FILE: &str = "journal.jsonl";
pub const COMPACTED_FILE: &str = "records.json";

#[derive(Debug, Error)]
pub enum LocalStoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LocalStoreError + '_ {
    move |source| LocalStoreError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpsertStats {
    pub inserted: usize,
    pub updated: usize,
    pub unchanged: usize,
}

/// Latest state per identifier, optionally backed by a directory.
#[derive(Debug, Default)]
pub struct LocalStore {
    dir: Option<PathBuf>,
    records: BTreeMap<String, HarvestedRecord>,
}

impl LocalStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(dir: &Path) -> Result<Self, LocalStoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut records = BTreeMap::new();
        let compacted = dir.join(COMPACTED_FILE);
        if compacted.exists() {
            let text = fs::read_to_string(&compacted).map_err(io_err(&compacted))?;
            records = serde_json::from_str(&text).map_err(|source| LocalStoreError::Json {
                path: compacted.clone(),
                line: 1,
                source,
            })?;
        }
        let journal = dir.join(JOURNAL_FILE);
        if journal.exists() {
            let f = File::open(&journal).map_err(io_err(&journal))?;
            for (n, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(io_err(&journal))?;
                if line.trim().is_empty() {
                    continue;
                }
                let r: HarvestedRecord = serde_json::from_str(&line).map_err(|source| LocalStoreError::Json {
                    path: journal.clone(),
                    line: n + 1,
                    source,
                })?;
                records.insert(r.identifier.clone(), r);
            }
        }
        Ok(Self {
            dir: Some(dir.to_owned()),
            records,
        })
    }

    pub fn get(&self, identifier: &str) -> Option<&HarvestedRecord> {
        self.records.get(identifier)
    }

    pub fn records(&self) -> impl Iterator<Item = &HarvestedRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Merge records, journaling only those that change something. A record
    /// without a datestamp keeps the datestamp already held.
    pub fn upsert_all(&mut self, incoming: &[HarvestedRecord]) -> Result<UpsertStats, LocalStoreError> {
        let mut stats = UpsertStats::default();
        let mut changed = Vec::new();
        for r in incoming {
            let mut r = r.clone();
            match self.records.get(&r.identifier) {
                Some(old) => {
                    if r.datestamp.is_none() {
                        r.datestamp = old.datestamp;
                    }
                    if old.metadata.is_some() && r.metadata.is_none() && !r.deleted {
                        r.metadata = old.metadata.clone();
                    }
                    if *old == r {
                        stats.unchanged += 1;
                        continue;
                    }
                    stats.updated += 1;
                }
                None => stats.inserted += 1,
            }
            changed.push(r.clone());
            self.records.insert(r.identifier.clone(), r);
        }
        if let (Some(dir), false) = (&self.dir, changed.is_empty()) {
            let path = dir.join(JOURNAL_FILE);
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(io_err(&path))?;
            let mut buf = String::new();
            for r in &changed {
                buf.push_str(&serde_json::to_string(r).expect("record serializes"));
                buf.push('\n');
            }
            f.write_all(buf.as_bytes()).map_err(io_err(&path))?;
            f.sync_data().map_err(io_err(&path))?;
        }
        Ok(stats)
    }

    pub fn compact(&self) -> Result<(), LocalStoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(COMPACTED_FILE);
        let tmp = dir.join(format!("{COMPACTED_FILE}.tmp"));
        let text = serde_json::to_string_pretty(&self.records).expect("records serialize");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        let journal = dir.join(JOURNAL_FILE);
        File::create(&journal).map_err(io_err(&journal))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, day: u32, meta: Option<&str>) -> HarvestedRecord {
        HarvestedRecord {
            identifier: id.into(),
            datestamp: crate::datestamp::Datestamp::from_ymd(2001, 1, day),
            deleted: false,
            metadata: meta.map(Into::into),
        }
    }

    #[test]
    fn journal_replay_and_compaction() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = LocalStore::open(dir.path()).unwrap();
        let stats = s.upsert_all(&[rec("a", 1, Some("<x/>")), rec("b", 1, None)]).unwrap();
        assert_eq!(stats.inserted, 2);
        let stats = s.upsert_all(&[rec("a", 1, Some("<x/>")), rec("b", 2, None)]).unwrap();
        assert_eq!((stats.unchanged, stats.updated), (1, 1));
        let journal = dir.path().join(JOURNAL_FILE);
        assert_eq!(fs::read_to_string(&journal).unwrap().lines().count(), 3);

        let reopened = LocalStore::open(dir.path()).unwrap();
        assert_eq!(reopened.records().collect::<Vec<_>>(), s.records().collect::<Vec<_>>());
        reopened.compact().unwrap();
        assert_eq!(fs::read_to_string(&journal).unwrap(), "");
        let again = LocalStore::open(dir.path()).unwrap();
        assert_eq!(again.get("b").unwrap().datestamp, rec("b", 2, None).datestamp);
    }

    #[test]
    fn identifiers_only_keep_known_fields() {
        let mut s = LocalStore::in_memory();
        s.upsert_all(&[rec("a", 3, Some("<x/>"))]).unwrap();
        let bare = HarvestedRecord {
            datestamp: None,
            metadata: None,
            ..rec("a", 1, None)
        };
        assert_eq!(s.upsert_all(&[bare]).unwrap().unchanged, 1);
    }
}
