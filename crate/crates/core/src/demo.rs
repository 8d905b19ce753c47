//! The bundled demonstration corpus and configuration.
//!
//! Records live in `demo/records/*.abs`; `demo/manifest.toml` gives the time
//! each was received and the ids removed afterwards.

use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::Deserialize;

use crate::clock::Clock;
use crate::crosswalk::{Crosswalk, CrosswalkTables};
use crate::id::{parse_internal_id, EprintId};
use crate::protocol::{Provider, RepositoryConfig};
use crate::store::{Store, StoreError};
use crate::taxonomy::TaxonomyConfig;

mod embedded {
    include!(concat!(env!("OUT_DIR"), "/demo_records.rs"));
}

const MANIFEST: &str = include_str!("../demo/manifest.toml");

#[derive(Deserialize)]
struct RawManifest {
    record: Vec<RawRecord>,
    #[serde(default)]
    deleted: Vec<RawDeleted>,
}

#[derive(Deserialize)]
struct RawRecord {
    file: String,
    received: DateTime<Utc>,
}

#[derive(Deserialize)]
struct RawDeleted {
    id: String,
    at: DateTime<Utc>,
    reason: String,
}

#[derive(Debug, Clone)]
pub struct DemoRecord {
    pub file: &'static str,
    pub bytes: &'static [u8],
    pub received: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct DemoDeletion {
    pub id: EprintId,
    pub at: DateTime<Utc>,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct DemoManifest {
    /// In ingest order.
    pub records: Vec<DemoRecord>,
    pub deleted: Vec<DemoDeletion>,
}

pub const REPOSITORY: &str = "arXiv";

pub fn manifest() -> DemoManifest {
    let raw: RawManifest = toml::from_str(MANIFEST).expect("bundled manifest");
    let records = raw
        .record
        .into_iter()
        .map(|r| {
            let (file, bytes) = embedded::RECORDS
                .iter()
                .find(|(f, _)| *f == r.file)
                .unwrap_or_else(|| panic!("manifest names missing file {}", r.file));
            DemoRecord {
                file,
                bytes,
                received: r.received,
            }
        })
        .collect();
    let deleted = raw
        .deleted
        .into_iter()
        .map(|d| DemoDeletion {
            id: parse_internal_id(&d.id).expect("manifest id"),
            at: d.at,
            reason: d.reason,
        })
        .collect();
    DemoManifest { records, deleted }
}

/// Ingest the corpus and apply its deletions.
pub fn load_into(store: &Store) -> Result<usize, StoreError> {
    let m = manifest();
    for r in &m.records {
        store.ingest(r.bytes, r.received)?;
    }
    for d in &m.deleted {
        store.mark_deleted(&d.id, &d.reason, d.at)?;
    }
    Ok(m.records.len())
}

pub fn taxonomy() -> Arc<TaxonomyConfig> {
    Arc::new(TaxonomyConfig::demo())
}

pub fn store() -> Store {
    let store = Store::in_memory(taxonomy(), REPOSITORY);
    load_into(&store).expect("demo corpus ingests");
    store
}

/// Create or refresh an on-disk store holding the corpus.
pub fn write_to_dir(dir: &Path) -> Result<Store, StoreError> {
    let store = Store::open_or_create(dir, taxonomy(), REPOSITORY)?;
    let m = manifest();
    for r in &m.records {
        match store.ingest(r.bytes, r.received) {
            Ok(_) | Err(StoreError::Duplicate(_)) | Err(StoreError::Deleted(_)) => {}
            Err(e) => return Err(e),
        }
    }
    for d in &m.deleted {
        store.mark_deleted(&d.id, &d.reason, d.at)?;
    }
    Ok(store)
}

pub fn crosswalk() -> Crosswalk {
    Crosswalk::new(Arc::new(CrosswalkTables::default()), taxonomy())
}

/// Demo store, demo repository config, no flow control.
pub fn provider(clock: Arc<dyn Clock>) -> Provider {
    Provider::new(
        Arc::new(store()),
        Arc::new(RepositoryConfig::demo()),
        Arc::new(crosswalk()),
        clock,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::Lookup;

    #[test]
    fn corpus_loads() {
        let m = manifest();
        assert_eq!(m.records.len(), embedded::RECORDS.len());
        let s = store();
        assert_eq!(s.len(), m.records.len());
        let deleted = s.read().index().entries().filter(|e| e.deleted).count();
        assert_eq!(deleted, m.deleted.len());
        let id = parse_internal_id("cs.SE/0101002").unwrap();
        let Lookup::Found(r) = s.get(&id) else { panic!() };
        assert_eq!(r.datestamp.to_string(), "2001-01-08");
    }

    #[test]
    fn disk_copy_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_to_dir(dir.path()).unwrap();
        let b = write_to_dir(dir.path()).unwrap();
        assert_eq!(a.index_snapshot(), b.index_snapshot());
        assert_eq!(b.index_snapshot(), store().index_snapshot());
    }
}
