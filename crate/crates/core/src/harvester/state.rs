//! Last completed harvest date per (base URL, set, prefix).
//!
//! Stored as a JSON object whose keys are `baseURL|set|prefix` (empty set or
//! prefix left empty) and whose values are `YYYY-MM-DD` dates.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::local::LocalStoreError;
use crate::datestamp::Datestamp;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HarvestState {
    entries: BTreeMap<String, Datestamp>,
}

pub fn state_key(base_url: &str, set: Option<&str>, prefix: Option<&str>) -> String {
    format!("{base_url}|{}|{}", set.unwrap_or(""), prefix.unwrap_or(""))
}

impl HarvestState {
    pub fn new() -> Self {
        Self::default()
    }

    /// An absent file is an empty state.
    pub fn load(path: &Path) -> Result<Self, LocalStoreError> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|source| LocalStoreError::Json {
                path: path.to_owned(),
                line: 1,
                source,
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(source) => Err(LocalStoreError::Io {
                path: path.to_owned(),
                source,
            }),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), LocalStoreError> {
        let io = |source| LocalStoreError::Io {
            path: path.to_owned(),
            source,
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string_pretty(self).expect("state serializes");
        std::fs::write(&tmp, text).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn last(&self, key: &str) -> Option<Datestamp> {
        self.entries.get(key).copied()
    }

    /// Never moves an entry backwards.
    pub fn advance(&mut self, key: &str, to: Datestamp) {
        let e = self.entries.entry(key.to_owned()).or_insert(to);
        if to > *e {
            *e = to;
        }
    }
}
