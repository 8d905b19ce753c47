//! File-backed metadata repository.
//!
//! Each e-print lives in one abs-format file at
//! `<root>/<archive>/<YYMM>/<YYMMNNN>.abs`, next to a `<YYMMNNN>.datestamp`
//! file holding the date of its last change. Removed e-prints are listed in
//! `<root>/deleted.tsv`. The datestamp index is kept in memory, updated on
//! every write and rebuildable from disk.
//!
//! Readers and the single writer share one lock, so a reader holding a
//! [`StoreView`] sees the index either before or after any write.

mod absfile;
mod deleted;
mod index;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock, RwLockReadGuard};

use chrono::{DateTime, Utc};
use thiserror::Error;

pub use absfile::{render as render_abs, InternalMetadata, ParseError, Submission, DATE_FORMAT};
pub use deleted::{DeletedEntry, DeletedTable};
pub use index::{DatestampIndex, IndexEntry};

use crate::datestamp::Datestamp;
use crate::id::{to_oai_identifier, EprintId};
use crate::taxonomy::{sets_for, SetSpec, TaxonomyConfig, TaxonomyError};

const DELETED_FILE: &str = "deleted.tsv";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0} is already stored with identical metadata")]
    Duplicate(EprintId),
    #[error("serial overflow in {0:?}: at most 999 e-prints per archive and month")]
    SerialOverflow(String),
    #[error("{new} conflicts with stored {existing}")]
    Conflict { new: Box<EprintId>, existing: Box<EprintId> },
    #[error("{id} has {stored} versions stored, refusing {offered}")]
    StaleVersion {
        id: EprintId,
        stored: u32,
        offered: u32,
    },
    #[error("{0} is deleted")]
    Deleted(EprintId),
    #[error("{0} not found")]
    NotFound(EprintId),
    #[error("bad range: from {from} is after until {until}")]
    BadRange { from: Datestamp, until: Datestamp },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("invalid store at {path}: {reason}")]
    InvalidStore { path: PathBuf, reason: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// A live record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredRecord {
    pub meta: Arc<InternalMetadata>,
    pub datestamp: Datestamp,
    pub sets: BTreeSet<SetSpec>,
}

/// Result of looking up one id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    Found(StoredRecord),
    Deleted { id: EprintId, datestamp: Datestamp },
    NotFound,
}

/// `archive/YYMMNNN`: subject-class is not needed to locate an e-print.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Slot(String);

impl Slot {
    fn of(id: &EprintId) -> Self {
        Self(format!("{}/{}", id.archive(), id.serial_part()))
    }
}

#[derive(Debug, Default)]
struct Inner {
    records: HashMap<Slot, StoredRecord>,
    deleted: DeletedTable,
    index: Option<DatestampIndex>,
}

impl Inner {
    fn index(&self) -> &DatestampIndex {
        self.index.as_ref().expect("index built at construction")
    }

    fn entry_for(&self, id: &EprintId, repository: &str) -> Option<IndexEntry> {
        let live = self.records.get(&Slot::of(id)).filter(|r| r.meta.id == *id);
        let deleted = self.deleted.get(id);
        let (datestamp, is_deleted) = match (live, deleted) {
            (_, Some(d)) => (d.datestamp, true),
            (Some(r), None) => (r.datestamp, false),
            (None, None) => return None,
        };
        Some(IndexEntry {
            datestamp,
            id: id.clone(),
            identifier: to_oai_identifier(id, repository).to_string(),
            sets: live.map(|r| r.sets.clone()).unwrap_or_default(),
            deleted: is_deleted,
        })
    }

    fn build_index(&self, repository: &str, now: DateTime<Utc>) -> DatestampIndex {
        let mut index = DatestampIndex::new(now);
        let ids = self
            .records
            .values()
            .map(|r| &r.meta.id)
            .chain(self.deleted.iter().map(|(id, _)| id));
        for id in ids {
            if let Some(entry) = self.entry_for(id, repository) {
                index.upsert(entry);
            }
        }
        index
    }
}

pub struct Store {
    inner: RwLock<Inner>,
    root: Option<PathBuf>,
    taxonomy: Arc<TaxonomyConfig>,
    repository: String,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("root", &self.root)
            .field("repository", &self.repository)
            .finish_non_exhaustive()
    }
}

impl Store {
    /// A store that lives only in memory.
    pub fn in_memory(taxonomy: Arc<TaxonomyConfig>, repository: &str) -> Self {
        let inner = Inner {
            index: Some(DatestampIndex::new(Utc::now())),
            ..Inner::default()
        };
        Self {
            inner: RwLock::new(inner),
            root: None,
            taxonomy,
            repository: repository.to_owned(),
        }
    }

    /// Open an existing store directory.
    pub fn open(root: &Path, taxonomy: Arc<TaxonomyConfig>, repository: &str) -> Result<Self, StoreError> {
        if !root.is_dir() {
            return Err(StoreError::InvalidStore {
                path: root.to_owned(),
                reason: "not a directory".into(),
            });
        }
        let mut inner = load_dir(root, &taxonomy)?;
        inner.index = Some(inner.build_index(repository, Utc::now()));
        Ok(Self {
            inner: RwLock::new(inner),
            root: Some(root.to_owned()),
            taxonomy,
            repository: repository.to_owned(),
        })
    }

    /// Open `root`, creating an empty store there if it does not exist.
    pub fn open_or_create(
        root: &Path,
        taxonomy: Arc<TaxonomyConfig>,
        repository: &str,
    ) -> Result<Self, StoreError> {
        if !root.exists() {
            fs::create_dir_all(root).map_err(io_err(root))?;
        }
        Self::open(root, taxonomy, repository)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn taxonomy(&self) -> &TaxonomyConfig {
        &self.taxonomy
    }

    pub fn repository(&self) -> &str {
        &self.repository
    }

    /// Hold a consistent read view for the duration of one request.
    pub fn read(&self) -> StoreView<'_> {
        StoreView {
            inner: self.inner.read().expect("store lock poisoned"),
        }
    }

    /// Parse and store one abs-format file. The record's datestamp becomes the
    /// date of `received_at`, never earlier than its previous datestamp.
    pub fn ingest(&self, bytes: &[u8], received_at: DateTime<Utc>) -> Result<StoredRecord, StoreError> {
        let meta = parse_abs(bytes)?;
        self.taxonomy.validate_id(&meta.id)?;
        for cat in &meta.crosslists {
            self.taxonomy.validate_category(cat)?;
        }
        let sets = sets_for(&meta.id, &meta.crosslists, &self.taxonomy)?;

        let mut inner = self.inner.write().expect("store lock poisoned");
        if inner.deleted.contains(&meta.id) {
            return Err(StoreError::Deleted(meta.id));
        }
        let slot = Slot::of(&meta.id);
        let mut datestamp = Datestamp::of(received_at);
        if let Some(existing) = inner.records.get(&slot) {
            if existing.meta.id != meta.id {
                return Err(StoreError::Conflict {
                    new: Box::new(meta.id),
                    existing: Box::new(existing.meta.id.clone()),
                });
            }
            if *existing.meta == meta {
                return Err(StoreError::Duplicate(meta.id));
            }
            if meta.latest_version() < existing.meta.latest_version() {
                return Err(StoreError::StaleVersion {
                    stored: existing.meta.latest_version(),
                    offered: meta.latest_version(),
                    id: meta.id,
                });
            }
            datestamp = datestamp.max(existing.datestamp);
        }

        if let Some(root) = &self.root {
            persist_record(root, &meta.id, bytes, datestamp)?;
        }
        let record = StoredRecord {
            meta: Arc::new(meta),
            datestamp,
            sets,
        };
        let id = record.meta.id.clone();
        inner.records.insert(slot, record.clone());
        let entry = inner.entry_for(&id, &self.repository).expect("just inserted");
        inner.index.as_mut().expect("index").upsert(entry);
        Ok(record)
    }

    pub fn get(&self, id: &EprintId) -> Lookup {
        self.read().get(id)
    }

    /// Inclusive datestamp range scan, optionally restricted to a set.
    pub fn scan(
        &self,
        from: Option<Datestamp>,
        until: Option<Datestamp>,
        set: Option<&SetSpec>,
    ) -> Result<Vec<IndexEntry>, StoreError> {
        let view = self.read();
        let entries = view.range(from, until, set)?.cloned().collect();
        Ok(entries)
    }

    /// A copy of the current index.
    pub fn index_snapshot(&self) -> DatestampIndex {
        self.read().index().clone()
    }

    /// Rebuild the index from scratch. A disk-backed store is re-read from
    /// its directory.
    pub fn rebuild_index(&self, now: DateTime<Utc>) -> Result<DatestampIndex, StoreError> {
        match &self.root {
            Some(root) => {
                let mut fresh = load_dir(root, &self.taxonomy)?;
                let index = fresh.build_index(&self.repository, now);
                fresh.index = Some(index.clone());
                *self.inner.write().expect("store lock poisoned") = fresh;
                Ok(index)
            }
            None => {
                let mut inner = self.inner.write().expect("store lock poisoned");
                let index = inner.build_index(&self.repository, now);
                inner.index = Some(index.clone());
                Ok(index)
            }
        }
    }

    /// Add `id` to the deleted table, advancing its datestamp to `now`.
    pub fn mark_deleted(&self, id: &EprintId, reason: &str, now: DateTime<Utc>) -> Result<(), StoreError> {
        let id = id.unversioned();
        let mut inner = self.inner.write().expect("store lock poisoned");
        let previous = match inner.entry_for(&id, &self.repository) {
            Some(e) => e.datestamp,
            None => return Err(StoreError::NotFound(id)),
        };
        let mut table = inner.deleted.clone();
        let reason = Some(reason.trim()).filter(|r| !r.is_empty()).map(str::to_owned);
        table.insert(
            id.clone(),
            DeletedEntry {
                datestamp: Datestamp::of(now).max(previous),
                reason,
            },
        );
        if let Some(root) = &self.root {
            write_atomic(&root.join(DELETED_FILE), table.render().as_bytes())?;
        }
        inner.deleted = table;
        let entry = inner.entry_for(&id, &self.repository).expect("entry exists");
        inner.index.as_mut().expect("index").upsert(entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.read().index().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A read lock on the store.
pub struct StoreView<'a> {
    inner: RwLockReadGuard<'a, Inner>,
}

impl StoreView<'_> {
    pub fn get(&self, id: &EprintId) -> Lookup {
        let id = id.unversioned();
        if let Some(d) = self.inner.deleted.get(&id) {
            return Lookup::Deleted {
                id,
                datestamp: d.datestamp,
            };
        }
        match self.inner.records.get(&Slot::of(&id)) {
            Some(r) if r.meta.id == id => Lookup::Found(r.clone()),
            _ => Lookup::NotFound,
        }
    }

    pub fn index(&self) -> &DatestampIndex {
        self.inner.index()
    }

    pub fn range<'s>(
        &'s self,
        from: Option<Datestamp>,
        until: Option<Datestamp>,
        set: Option<&'s SetSpec>,
    ) -> Result<impl Iterator<Item = &'s IndexEntry> + 's, StoreError> {
        if let (Some(from), Some(until)) = (from, until) {
            if from > until {
                return Err(StoreError::BadRange { from, until });
            }
        }
        Ok(self.inner.index().range(from, until, set))
    }
}

fn record_paths(root: &Path, id: &EprintId) -> (PathBuf, PathBuf) {
    let dir = root.join(id.archive()).join(format!("{:04}", id.yymm()));
    let serial = id.serial_part();
    (
        dir.join(format!("{serial}.abs")),
        dir.join(format!("{serial}.datestamp")),
    )
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn persist_record(root: &Path, id: &EprintId, bytes: &[u8], datestamp: Datestamp) -> Result<(), StoreError> {
    let (abs, stamp) = record_paths(root, id);
    let dir = abs.parent().expect("record path has a parent");
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_atomic(&abs, bytes)?;
    write_atomic(&stamp, format!("{datestamp}\n").as_bytes())
}

fn load_dir(root: &Path, taxonomy: &TaxonomyConfig) -> Result<Inner, StoreError> {
    let invalid = |path: &Path, reason: String| StoreError::InvalidStore {
        path: path.to_owned(),
        reason,
    };
    let mut inner = Inner::default();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| invalid(root, e.to_string()))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "abs") {
            continue;
        }
        let bytes = fs::read(path).map_err(io_err(path))?;
        let meta = absfile::parse(&bytes).map_err(|e| match e {
            absfile::AbsError::Parse(p) => invalid(path, p.to_string()),
            absfile::AbsError::SerialOverflow(s) => invalid(path, format!("serial overflow in {s}")),
        })?;
        let (expected, stamp_path) = record_paths(root, &meta.id);
        if expected != path {
            return Err(invalid(path, format!("file holds {} and belongs at {}", meta.id, expected.display())));
        }
        let datestamp = match fs::read_to_string(&stamp_path) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|e| invalid(&stamp_path, format!("{e}")))?,
            // No recorded datestamp: fall back to the file modification date.
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let mtime = entry
                    .metadata()
                    .map_err(|e| invalid(path, e.to_string()))?
                    .modified()
                    .map_err(io_err(path))?;
                Datestamp::of(mtime.into())
            }
            Err(e) => return Err(io_err(&stamp_path)(e)),
        };
        let sets = sets_for(&meta.id, &meta.crosslists, taxonomy).map_err(|e| invalid(path, e.to_string()))?;
        let slot = Slot::of(&meta.id);
        inner.records.insert(
            slot,
            StoredRecord {
                meta: Arc::new(meta),
                datestamp,
                sets,
            },
        );
    }
    let deleted_path = root.join(DELETED_FILE);
    match fs::read_to_string(&deleted_path) {
        Ok(text) => inner.deleted = DeletedTable::parse(&text).map_err(|e| invalid(&deleted_path, e))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(io_err(&deleted_path)(e)),
    }
    Ok(inner)
}

/// Parse one abs-format file without storing it.
pub fn parse_abs(bytes: &[u8]) -> Result<InternalMetadata, StoreError> {
    absfile::parse(bytes).map_err(|e| match e {
        absfile::AbsError::Parse(p) => StoreError::Parse(p),
        absfile::AbsError::SerialOverflow(s) => StoreError::SerialOverflow(s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::parse_internal_id;
    use chrono::TimeZone;

    fn at(y: i32, m: u32, d: u32, h: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, h, 0, 0).unwrap()
    }

    fn abs(id: &str, title: &str, journal: Option<&str>) -> String {
        let mut s = format!(
            "Paper: {id}\nDate: Tue, 23 Jan 2001 18:43:21 GMT   (12kb)\nTitle: {title}\nAuthors: A N Author\n"
        );
        if let Some(j) = journal {
            s.push_str(&format!("Journal-ref: {j}\n"));
        }
        s.push_str("\\\\\n  Abstract.\n");
        s
    }

    fn store() -> Store {
        Store::in_memory(Arc::new(TaxonomyConfig::demo()), "arXiv")
    }

    fn id(s: &str) -> EprintId {
        parse_internal_id(s).unwrap()
    }

    #[test]
    fn ingest_sets_datestamp_from_receipt() {
        let s = store();
        let r = s.ingest(abs("cs.DL/0101042", "T", None).as_bytes(), at(2001, 1, 25, 23)).unwrap();
        assert_eq!(r.datestamp.to_string(), "2001-01-25");
        assert!(matches!(s.get(&id("cs.DL/0101042")), Lookup::Found(_)));
        assert!(matches!(s.get(&id("cs.DL/0101042v1")), Lookup::Found(_)));
    }

    #[test]
    fn missing_title_is_a_parse_error() {
        let s = store();
        let text = "Paper: cs.DL/0101042\nDate: Tue, 23 Jan 2001 18:43:21 GMT\nAuthors: X Y\n\\\\\n  A.\n";
        assert!(matches!(s.ingest(text.as_bytes(), at(2001, 1, 25, 0)), Err(StoreError::Parse(_))));
        assert!(s.is_empty());
    }

    #[test]
    fn reingest_with_change_advances_datestamp() {
        let s = store();
        let before = s.ingest(abs("hep-th/9901001", "T", None).as_bytes(), at(1999, 1, 4, 9)).unwrap();
        let after = s
            .ingest(abs("hep-th/9901001", "T", Some("Phys. Rev. D 60")).as_bytes(), at(1999, 6, 1, 9))
            .unwrap();
        assert!(after.datestamp > before.datestamp);
        assert_eq!(after.datestamp.to_string(), "1999-06-01");
    }

    #[test]
    fn datestamp_never_moves_backwards() {
        let s = store();
        s.ingest(abs("hep-th/9901001", "T", None).as_bytes(), at(1999, 6, 1, 9)).unwrap();
        let r = s.ingest(abs("hep-th/9901001", "T2", None).as_bytes(), at(1999, 1, 1, 9)).unwrap();
        assert_eq!(r.datestamp.to_string(), "1999-06-01");
    }

    #[test]
    fn duplicate_and_conflict() {
        let s = store();
        let text = abs("math.DS/9204240", "T", None);
        s.ingest(text.as_bytes(), at(1992, 4, 1, 0)).unwrap();
        assert!(matches!(s.ingest(text.as_bytes(), at(1992, 4, 2, 0)), Err(StoreError::Duplicate(_))));
        assert!(matches!(
            s.ingest(abs("math.LO/9204240", "T", None).as_bytes(), at(1992, 4, 2, 0)),
            Err(StoreError::Conflict { .. })
        ));
        assert!(matches!(
            s.ingest(abs("math/9204240", "T", None).as_bytes(), at(1992, 4, 2, 0)),
            Err(StoreError::Taxonomy(TaxonomyError::MissingSubjectClass(_)))
        ));
    }

    #[test]
    fn serial_overflow_rejected() {
        let s = store();
        assert!(matches!(
            s.ingest(abs("astro-ph/00111000", "T", None).as_bytes(), at(2000, 11, 30, 0)),
            Err(StoreError::SerialOverflow(_))
        ));
    }

    #[test]
    fn get_tri_state() {
        let s = store();
        s.ingest(abs("hep-ph/0001005", "T", None).as_bytes(), at(2000, 1, 10, 0)).unwrap();
        s.mark_deleted(&id("hep-ph/0001005"), "duplicate copy", at(2000, 6, 1, 0)).unwrap();
        match s.get(&id("hep-ph/0001005")) {
            Lookup::Deleted { datestamp, .. } => assert_eq!(datestamp.to_string(), "2000-06-01"),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.get(&id("hep-ph/0001006")), Lookup::NotFound);
        assert!(matches!(
            s.mark_deleted(&id("hep-ph/0001006"), "x", at(2000, 6, 1, 0)),
            Err(StoreError::NotFound(_))
        ));
        assert!(matches!(
            s.ingest(abs("hep-ph/0001005", "T3", None).as_bytes(), at(2000, 7, 1, 0)),
            Err(StoreError::Deleted(_))
        ));
    }

    #[test]
    fn deletion_visible_in_scan_from_deletion_date() {
        let s = store();
        s.ingest(abs("hep-ph/0001005", "T", None).as_bytes(), at(2000, 1, 10, 0)).unwrap();
        s.mark_deleted(&id("hep-ph/0001005"), "inappropriate", at(2000, 6, 1, 12)).unwrap();
        let from = "2000-06-01".parse().ok();
        let hits = s.scan(from, None, None).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].deleted);
        assert_eq!(hits[0].sets.len(), 1, "deleted records keep set membership");
        let rebuilt = s.rebuild_index(at(2000, 6, 2, 0)).unwrap();
        assert!(rebuilt.get(&id("hep-ph/0001005")).unwrap().deleted);
    }

    #[test]
    fn scan_filters() {
        let s = store();
        s.ingest(abs("math.DS/9204240", "T", None).as_bytes(), at(1992, 4, 1, 0)).unwrap();
        s.ingest(abs("math.DS/9204241", "T", None).as_bytes(), at(1992, 4, 20, 0)).unwrap();
        s.ingest(abs("cs.DL/0101042", "T", None).as_bytes(), at(2001, 1, 25, 0)).unwrap();
        assert_eq!(s.scan(None, None, None).unwrap().len(), 3);
        let cs = SetSpec::group("cs");
        let hits = s.scan(None, None, Some(&cs)).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].identifier, "oai:arXiv:cs.DL/0101042");
        let april: Vec<_> = s
            .scan("1992-04-01".parse().ok(), "1992-04-30".parse().ok(), None)
            .unwrap()
            .into_iter()
            .map(|e| (e.identifier, e.datestamp.to_string()))
            .collect();
        assert_eq!(
            april,
            [
                ("oai:arXiv:math.DS/9204240".to_owned(), "1992-04-01".to_owned()),
                ("oai:arXiv:math.DS/9204241".to_owned(), "1992-04-20".to_owned()),
            ]
        );
        assert!(matches!(
            s.scan("1992-05-01".parse().ok(), "1992-04-01".parse().ok(), None),
            Err(StoreError::BadRange { .. })
        ));
    }

    #[test]
    fn empty_store_rebuilds_empty() {
        let s = store();
        assert!(s.rebuild_index(Utc::now()).unwrap().is_empty());
    }

    #[test]
    fn disk_store_persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let tax = Arc::new(TaxonomyConfig::demo());
        let s = Store::open(dir.path(), tax.clone(), "arXiv").unwrap();
        s.ingest(abs("math.DS/9204240", "T", None).as_bytes(), at(1992, 4, 1, 0)).unwrap();
        s.ingest(abs("hep-ph/0001005", "T", None).as_bytes(), at(2000, 1, 10, 0)).unwrap();
        s.mark_deleted(&id("hep-ph/0001005"), "duplicate", at(2000, 6, 1, 0)).unwrap();
        assert!(dir.path().join("math/9204/9204240.abs").is_file());
        assert_eq!(
            fs::read_to_string(dir.path().join("math/9204/9204240.datestamp")).unwrap(),
            "1992-04-01\n"
        );
        let incremental = s.index_snapshot();
        assert_eq!(s.rebuild_index(Utc::now()).unwrap(), incremental);

        let reopened = Store::open(dir.path(), tax, "arXiv").unwrap();
        assert_eq!(reopened.index_snapshot(), incremental);
        assert!(matches!(reopened.get(&id("hep-ph/0001005")), Lookup::Deleted { .. }));
    }

    #[test]
    fn open_rejects_bad_directories() {
        let tax = Arc::new(TaxonomyConfig::demo());
        assert!(matches!(
            Store::open(Path::new("/nonexistent/store"), tax.clone(), "arXiv"),
            Err(StoreError::InvalidStore { .. })
        ));
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("math/9204")).unwrap();
        fs::write(dir.path().join("math/9204/9204240.abs"), "garbage").unwrap();
        assert!(matches!(Store::open(dir.path(), tax, "arXiv"), Err(StoreError::InvalidStore { .. })));
    }
}
