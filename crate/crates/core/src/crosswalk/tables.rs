//! Mapping tables used by the crosswalks.
//!
//! The defaults are compiled in from `data/`. A directory with any of the
//! same file names can replace them at startup:
//!
//! * `tex_accents.tsv`: `accent<TAB>letter<TAB>result`, e.g. `"`, `o`, `ö`
//! * `tex_glyphs.tsv`: `name<TAB>result`, e.g. `ss`, `ß`
//! * `languages.tsv`: `Name<TAB>code`, e.g. `French`, `fr`
//! * `name_affixes.toml`: `prefixes = [...]` and `suffixes = [...]`
//!
//! Lines starting with `#` and blank lines are ignored in the TSV files.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

const ACCENTS: &str = include_str!("../../data/tex_accents.tsv");
const GLYPHS: &str = include_str!("../../data/tex_glyphs.tsv");
const LANGUAGES: &str = include_str!("../../data/languages.tsv");
const AFFIXES: &str = include_str!("../../data/name_affixes.toml");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{file} line {line}: {message}")]
    Syntax {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: {source}")]
    Affixes {
        file: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosswalkTables {
    /// `(accent, base letter) -> character`
    pub accents: HashMap<(String, char), String>,
    pub glyphs: HashMap<String, String>,
    /// Lowercased language name to ISO 639 code.
    pub languages: HashMap<String, String>,
    pub prefixes: BTreeSet<String>,
    pub suffixes: BTreeSet<String>,
}

#[derive(Deserialize)]
struct Affixes {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
}

fn tsv_rows<'a>(file: &'a str, text: &'a str, columns: usize) -> impl Iterator<Item = Result<(usize, Vec<&'a str>), TableError>> + 'a {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(move |(n, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() != columns || cols.iter().any(|c| c.is_empty()) {
                return Err(TableError::Syntax {
                    file: file.to_owned(),
                    line: n + 1,
                    message: format!("expected {columns} tab-separated columns"),
                });
            }
            Ok((n + 1, cols))
        })
}

fn parse_accents(text: &str) -> Result<HashMap<(String, char), String>, TableError> {
    let mut map = HashMap::new();
    for row in tsv_rows("tex_accents.tsv", text, 3) {
        let (line, cols) = row?;
        let mut letters = cols[1].chars();
        let (Some(base), None) = (letters.next(), letters.next()) else {
            return Err(TableError::Syntax {
                file: "tex_accents.tsv".into(),
                line,
                message: "base must be a single letter".into(),
            });
        };
        map.insert((cols[0].to_owned(), base), cols[2].to_owned());
    }
    Ok(map)
}

fn parse_pairs(file: &str, text: &str, lowercase_key: bool) -> Result<HashMap<String, String>, TableError> {
    let mut map = HashMap::new();
    for row in tsv_rows(file, text, 2) {
        let (_, cols) = row?;
        let key = if lowercase_key {
            cols[0].to_lowercase()
        } else {
            cols[0].to_owned()
        };
        map.insert(key, cols[1].to_owned());
    }
    Ok(map)
}

fn parse_affixes(file: &str, text: &str) -> Result<(BTreeSet<String>, BTreeSet<String>), TableError> {
    let a: Affixes = toml::from_str(text).map_err(|source| TableError::Affixes {
        file: file.to_owned(),
        source,
    })?;
    Ok((a.prefixes.into_iter().collect(), a.suffixes.into_iter().collect()))
}

impl Default for CrosswalkTables {
    fn default() -> Self {
        let (prefixes, suffixes) = parse_affixes("name_affixes.toml", AFFIXES).expect("bundled affixes");
        Self {
            accents: parse_accents(ACCENTS).expect("bundled accent table"),
            glyphs: parse_pairs("tex_glyphs.tsv", GLYPHS, false).expect("bundled glyph table"),
            languages: parse_pairs("languages.tsv", LANGUAGES, true).expect("bundled language table"),
            prefixes,
            suffixes,
        }
    }
}

impl CrosswalkTables {
    /// Defaults, with any table files present in `dir` replacing them.
    pub fn load_dir(dir: &Path) -> Result<Self, TableError> {
        let mut tables = Self::default();
        let read = |name: &str| -> Result<Option<String>, TableError> {
            match std::fs::read_to_string(dir.join(name)) {
                Ok(t) => Ok(Some(t)),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                Err(source) => Err(TableError::Io {
                    file: name.to_owned(),
                    source,
                }),
            }
        };
        if let Some(t) = read("tex_accents.tsv")? {
            tables.accents = parse_accents(&t)?;
        }
        if let Some(t) = read("tex_glyphs.tsv")? {
            tables.glyphs = parse_pairs("tex_glyphs.tsv", &t, false)?;
        }
        if let Some(t) = read("languages.tsv")? {
            tables.languages = parse_pairs("languages.tsv", &t, true)?;
        }
        if let Some(t) = read("name_affixes.toml")? {
            (tables.prefixes, tables.suffixes) = parse_affixes("name_affixes.toml", &t)?;
        }
        Ok(tables)
    }
}
