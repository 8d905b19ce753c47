//! Lookup table of removed e-prints.
//!
//! Stored as one tab-separated line per id: `id<TAB>YYYY-MM-DD<TAB>reason`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::datestamp::Datestamp;
use crate::id::{parse_internal_id, EprintId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletedEntry {
    pub datestamp: Datestamp,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeletedTable {
    entries: BTreeMap<EprintId, DeletedEntry>,
}

impl DeletedTable {
    pub fn contains(&self, id: &EprintId) -> bool {
        self.entries.contains_key(id)
    }

    pub fn get(&self, id: &EprintId) -> Option<&DeletedEntry> {
        self.entries.get(id)
    }

    pub fn insert(&mut self, id: EprintId, entry: DeletedEntry) {
        self.entries.insert(id, entry);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EprintId, &DeletedEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut table = Self::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.splitn(3, '\t');
            let id = cols.next().unwrap_or_default();
            let date = cols.next().ok_or_else(|| format!("line {}: missing date column", n + 1))?;
            let reason = cols.next().map(str::trim).filter(|r| !r.is_empty());
            let id = parse_internal_id(id).map_err(|e| format!("line {}: {e}", n + 1))?;
            let datestamp = date.parse().map_err(|e| format!("line {}: {e}", n + 1))?;
            table.insert(
                id.unversioned(),
                DeletedEntry {
                    datestamp,
                    reason: reason.map(str::to_owned),
                },
            );
        }
        Ok(table)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (id, e) in &self.entries {
            let _ = writeln!(
                out,
                "{id}\t{}\t{}",
                e.datestamp,
                e.reason.as_deref().unwrap_or("").replace(['\t', '\n'], " ")
            );
        }
        out
    }
}
