use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;

use chrono::{DateTime, Utc};

use crate::datestamp::Datestamp;
use crate::id::EprintId;
use crate::taxonomy::SetSpec;

/// One exposed record in datestamp order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub datestamp: Datestamp,
    pub id: EprintId,
    /// The OAI identifier, also the secondary sort key.
    pub identifier: String,
    pub sets: BTreeSet<SetSpec>,
    pub deleted: bool,
}

type Key = (Datestamp, String);

/// Entries ordered by `(datestamp, identifier)`, one per record.
#[derive(Debug, Clone)]
pub struct DatestampIndex {
    entries: BTreeMap<Key, IndexEntry>,
    keys: HashMap<EprintId, Key>,
    built_at: DateTime<Utc>,
}

impl PartialEq for DatestampIndex {
    /// Compares contents; `built_at` is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl DatestampIndex {
    pub fn new(built_at: DateTime<Utc>) -> Self {
        Self {
            entries: BTreeMap::new(),
            keys: HashMap::new(),
            built_at,
        }
    }

    pub fn built_at(&self) -> DateTime<Utc> {
        self.built_at
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Insert or replace the entry for `entry.id`.
    pub fn upsert(&mut self, entry: IndexEntry) {
        if let Some(old) = self.keys.remove(&entry.id) {
            self.entries.remove(&old);
        }
        let key = (entry.datestamp, entry.identifier.clone());
        self.keys.insert(entry.id.clone(), key.clone());
        self.entries.insert(key, entry);
    }

    pub fn get(&self, id: &EprintId) -> Option<&IndexEntry> {
        self.keys.get(id).and_then(|k| self.entries.get(k))
    }

    pub fn entries(&self) -> impl Iterator<Item = &IndexEntry> {
        self.entries.values()
    }

    /// Entries with `from <= datestamp <= until`, optionally restricted to a
    /// set, in index order.
    pub fn range<'a>(
        &'a self,
        from: Option<Datestamp>,
        until: Option<Datestamp>,
        set: Option<&'a SetSpec>,
    ) -> impl Iterator<Item = &'a IndexEntry> + 'a {
        let lower = match from {
            Some(d) => Bound::Included((d, String::new())),
            None => Bound::Unbounded,
        };
        self.entries
            .range((lower, Bound::Unbounded))
            .map(|(_, e)| e)
            .take_while(move |e| until.is_none_or(|u| e.datestamp <= u))
            .filter(move |e| set.is_none_or(|s| e.sets.contains(s)))
    }
}
