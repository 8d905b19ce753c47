//! Group / archive / subject-class hierarchy and the OAI sets derived from it.
//!
//! Only the group layer is exposed as sets. An e-print belongs to the set of
//! its primary archive's group and to the set of every group it is
//! cross-listed into.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::id::{is_valid_archive_name, is_valid_subject_class, EprintId};

const DEMO_TAXONOMY: &str = include_str!("../data/taxonomy.toml");

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("unknown archive {0:?}")]
    UnknownArchive(String),
    #[error("unknown set {0:?}")]
    UnknownSet(String),
    #[error("malformed setSpec {0:?}")]
    MalformedSetSpec(String),
    #[error("malformed category {0:?}, expected archive[.SC]")]
    MalformedCategory(String),
    #[error("archive {0:?} requires a subject-class")]
    MissingSubjectClass(String),
    #[error("archive {archive:?} has no subject-class {subject_class:?}")]
    UnknownSubjectClass {
        archive: String,
        subject_class: String,
    },
    #[error("invalid taxonomy: {0}")]
    Invalid(String),
    #[error("cannot read taxonomy: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse taxonomy: {0}")]
    Parse(#[from] toml::de::Error),
}

/// A setSpec: a group token plus optional deeper path components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetSpec {
    group: String,
    path: Vec<String>,
}

fn valid_set_component(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ':' || c == '_')
}

impl SetSpec {
    pub fn group(name: &str) -> Self {
        Self {
            group: name.to_owned(),
            path: Vec::new(),
        }
    }

    pub fn group_name(&self) -> &str {
        &self.group
    }

    pub fn path(&self) -> &[String] {
        &self.path
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.group)?;
        for p in &self.path {
            write!(f, ":{p}")?;
        }
        Ok(())
    }
}

impl FromStr for SetSpec {
    type Err = TaxonomyError;

    /// Syntax only; registration is checked by [`TaxonomyConfig::set_spec`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let group = parts.next().unwrap_or_default();
        let path: Vec<String> = parts.map(str::to_owned).collect();
        if !valid_set_component(group) || !path.iter().all(|p| valid_set_component(p)) {
            return Err(TaxonomyError::MalformedSetSpec(s.to_owned()));
        }
        Ok(Self {
            group: group.to_owned(),
            path,
        })
    }
}

/// A cross-list target, `archive[.SC]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CategoryRef {
    pub archive: String,
    pub subject_class: Option<String>,
}

impl CategoryRef {
    pub fn of(id: &EprintId) -> Self {
        Self {
            archive: id.archive().to_owned(),
            subject_class: id.subject_class().map(str::to_owned),
        }
    }
}

impl fmt::Display for CategoryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.subject_class {
            Some(sc) => write!(f, "{}.{sc}", self.archive),
            None => f.write_str(&self.archive),
        }
    }
}

impl FromStr for CategoryRef {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (archive, sc) = match s.split_once('.') {
            Some((a, sc)) => (a, Some(sc)),
            None => (s, None),
        };
        if !is_valid_archive_name(archive) || !sc.is_none_or(is_valid_subject_class) {
            return Err(TaxonomyError::MalformedCategory(s.to_owned()));
        }
        Ok(Self {
            archive: archive.to_owned(),
            subject_class: sc.map(str::to_owned),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Group {
    pub spec: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Archive {
    pub name: String,
    pub group: String,
    pub display: String,
    #[serde(default)]
    pub subject_class_mandatory: bool,
    #[serde(default)]
    pub subject_classes: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct TaxonomyFile {
    #[serde(default, rename = "group")]
    groups: Vec<Group>,
    #[serde(default, rename = "archive")]
    archives: Vec<Archive>,
}

/// Groups (exposed as sets, in declaration order) and the archives in each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyConfig {
    groups: Vec<Group>,
    archives: BTreeMap<String, Archive>,
}

impl TaxonomyConfig {
    pub fn new(groups: Vec<Group>, archives: Vec<Archive>) -> Result<Self, TaxonomyError> {
        let mut seen = HashSet::new();
        for g in &groups {
            if !valid_set_component(&g.spec) {
                return Err(TaxonomyError::Invalid(format!("bad set token {:?}", g.spec)));
            }
            if !seen.insert(g.spec.as_str()) {
                return Err(TaxonomyError::Invalid(format!("duplicate set token {:?}", g.spec)));
            }
        }
        let mut by_name = BTreeMap::new();
        for a in archives {
            if !is_valid_archive_name(&a.name) {
                return Err(TaxonomyError::Invalid(format!("bad archive name {:?}", a.name)));
            }
            if !seen.contains(a.group.as_str()) {
                return Err(TaxonomyError::Invalid(format!(
                    "archive {:?} maps to unregistered group {:?}",
                    a.name, a.group
                )));
            }
            if let Some(sc) = a.subject_classes.keys().find(|sc| !is_valid_subject_class(sc)) {
                return Err(TaxonomyError::Invalid(format!(
                    "archive {:?} has malformed subject-class {sc:?}",
                    a.name
                )));
            }
            let name = a.name.clone();
            if by_name.insert(name.clone(), a).is_some() {
                return Err(TaxonomyError::Invalid(format!("archive {name:?} declared twice")));
            }
        }
        Ok(Self {
            groups,
            archives: by_name,
        })
    }

    pub fn empty() -> Self {
        Self {
            groups: Vec::new(),
            archives: BTreeMap::new(),
        }
    }

    /// The bundled demo taxonomy: physics, math, cs and nlin.
    pub fn demo() -> Self {
        Self::from_toml(DEMO_TAXONOMY).expect("bundled taxonomy is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, TaxonomyError> {
        let file: TaxonomyFile = toml::from_str(text)?;
        Self::new(file.groups, file.archives)
    }

    pub fn load(path: &Path) -> Result<Self, TaxonomyError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn archive(&self, name: &str) -> Option<&Archive> {
        self.archives.get(name)
    }

    pub fn archives(&self) -> impl Iterator<Item = &Archive> {
        self.archives.values()
    }

    fn group_of(&self, archive: &str) -> Result<&str, TaxonomyError> {
        self.archives
            .get(archive)
            .map(|a| a.group.as_str())
            .ok_or_else(|| TaxonomyError::UnknownArchive(archive.to_owned()))
    }

    /// Parse a setSpec and check that it names a registered set.
    pub fn set_spec(&self, text: &str) -> Result<SetSpec, TaxonomyError> {
        let spec: SetSpec = text.parse()?;
        if !spec.path.is_empty() || !self.groups.iter().any(|g| g.spec == spec.group) {
            return Err(TaxonomyError::UnknownSet(text.to_owned()));
        }
        Ok(spec)
    }

    /// Check an id against archive registration and subject-class rules.
    pub fn validate_id(&self, id: &EprintId) -> Result<(), TaxonomyError> {
        self.validate_category(&CategoryRef::of(id))
    }

    pub fn validate_category(&self, cat: &CategoryRef) -> Result<(), TaxonomyError> {
        let archive = self
            .archives
            .get(&cat.archive)
            .ok_or_else(|| TaxonomyError::UnknownArchive(cat.archive.clone()))?;
        match &cat.subject_class {
            None if archive.subject_class_mandatory => {
                Err(TaxonomyError::MissingSubjectClass(cat.archive.clone()))
            }
            Some(sc) if !archive.subject_classes.contains_key(sc) => {
                Err(TaxonomyError::UnknownSubjectClass {
                    archive: cat.archive.clone(),
                    subject_class: sc.clone(),
                })
            }
            _ => Ok(()),
        }
    }

    /// Display name of a category: the subject-class name when there is one,
    /// otherwise the archive's name.
    pub fn display_name(&self, cat: &CategoryRef) -> Option<&str> {
        let archive = self.archives.get(&cat.archive)?;
        match &cat.subject_class {
            Some(sc) => archive.subject_classes.get(sc).map(String::as_str),
            None => Some(archive.display.as_str()),
        }
    }
}

/// The sets an e-print belongs to: the groups of its primary archive and of
/// every cross-listed archive.
pub fn sets_for(
    primary: &EprintId,
    crosslists: &[CategoryRef],
    taxonomy: &TaxonomyConfig,
) -> Result<BTreeSet<SetSpec>, TaxonomyError> {
    let mut sets = BTreeSet::new();
    sets.insert(SetSpec::group(taxonomy.group_of(primary.archive())?));
    for cat in crosslists {
        sets.insert(SetSpec::group(taxonomy.group_of(&cat.archive)?));
    }
    Ok(sets)
}
