//! E-print identifiers and their `oai:` URI form.
//!
//! Internal identifiers look like `hep-th/9901001`, `math.SG/0001001` or
//! `quant-ph/9912010v2`: an archive name, an optional two-letter primary
//! subject-class, a `YYMM` month and a three digit serial, optionally followed
//! by a version suffix. The OAI boundary only ever exposes the latest version,
//! so [`OaiIdentifier`] carries no version.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Why an identifier was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("malformed identifier {input:?}: {reason}")]
    Malformed { input: String, reason: &'static str },
    #[error("identifier {0:?} does not use the oai scheme")]
    WrongScheme(String),
    #[error("identifier {input:?} belongs to repository {found:?}, expected {expected:?}")]
    WrongRepository {
        input: String,
        expected: String,
        found: String,
    },
    #[error("malformed local part in {input:?}: {source}")]
    MalformedLocalPart {
        input: String,
        #[source]
        source: Box<IdError>,
    },
}

fn malformed(input: &str, reason: &'static str) -> IdError {
    IdError::Malformed {
        input: input.to_owned(),
        reason,
    }
}

/// Archive names are lowercase letters and hyphens, 2 to 16 characters.
pub fn is_valid_archive_name(name: &str) -> bool {
    (2..=16).contains(&name.len()) && name.bytes().all(|b| b.is_ascii_lowercase() || b == b'-')
}

pub fn is_valid_subject_class(sc: &str) -> bool {
    sc.len() == 2 && sc.bytes().all(|b| b.is_ascii_uppercase())
}

/// An internal e-print identifier, `archive[.SC]/YYMMNNN[vN]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EprintId {
    archive: String,
    subject_class: Option<String>,
    yymm: u16,
    number: u16,
    version: Option<u32>,
}

impl EprintId {
    pub fn new(
        archive: &str,
        subject_class: Option<&str>,
        yymm: u16,
        number: u16,
        version: Option<u32>,
    ) -> Result<Self, IdError> {
        let shown = format!(
            "{archive}{}/{yymm:04}{number:03}",
            subject_class.map(|s| format!(".{s}")).unwrap_or_default()
        );
        if !is_valid_archive_name(archive) {
            return Err(malformed(&shown, "bad archive name"));
        }
        if let Some(sc) = subject_class {
            if !is_valid_subject_class(sc) {
                return Err(malformed(&shown, "subject-class must be two uppercase letters"));
            }
        }
        if yymm > 9999 || !(1..=12).contains(&(yymm % 100)) {
            return Err(malformed(&shown, "invalid month"));
        }
        if number == 0 {
            return Err(malformed(&shown, "serial 000 is not used"));
        }
        if number > 999 {
            return Err(malformed(&shown, "serial exceeds 999"));
        }
        if version == Some(0) {
            return Err(malformed(&shown, "versions start at 1"));
        }
        Ok(Self {
            archive: archive.to_owned(),
            subject_class: subject_class.map(str::to_owned),
            yymm,
            number,
            version,
        })
    }

    pub fn archive(&self) -> &str {
        &self.archive
    }

    pub fn subject_class(&self) -> Option<&str> {
        self.subject_class.as_deref()
    }

    /// The raw four digit `YYMM` value.
    pub fn yymm(&self) -> u16 {
        self.yymm
    }

    /// Calendar year, windowed: 91-99 are the 1990s, 00-90 the 2000s.
    pub fn year(&self) -> u16 {
        let yy = self.yymm / 100;
        if yy >= 91 {
            1900 + yy
        } else {
            2000 + yy
        }
    }

    pub fn month(&self) -> u8 {
        (self.yymm % 100) as u8
    }

    pub fn number(&self) -> u16 {
        self.number
    }

    pub fn version(&self) -> Option<u32> {
        self.version
    }

    pub fn with_version(&self, version: Option<u32>) -> Self {
        Self {
            version,
            ..self.clone()
        }
    }

    /// The identifier without any version suffix.
    pub fn unversioned(&self) -> Self {
        self.with_version(None)
    }

    /// The `YYMMNNN` part.
    pub fn serial_part(&self) -> String {
        format!("{:04}{:03}", self.yymm, self.number)
    }

    /// `archive[.SC]`
    pub fn category(&self) -> String {
        match &self.subject_class {
            Some(sc) => format!("{}.{sc}", self.archive),
            None => self.archive.clone(),
        }
    }
}

impl fmt::Display for EprintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{:04}{:03}", self.category(), self.yymm, self.number)?;
        if let Some(v) = self.version {
            write!(f, "v{v}")?;
        }
        Ok(())
    }
}

impl FromStr for EprintId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_internal_id(s)
    }
}

/// Parse `archive[.SC]/YYMMNNN[vN]`.
pub fn parse_internal_id(text: &str) -> Result<EprintId, IdError> {
    let (category, serial) = text
        .split_once('/')
        .ok_or_else(|| malformed(text, "missing '/'"))?;
    let (archive, subject_class) = match category.split_once('.') {
        Some((a, sc)) => (a, Some(sc)),
        None => (category, None),
    };
    if !is_valid_archive_name(archive) {
        return Err(malformed(text, "bad archive name"));
    }
    if let Some(sc) = subject_class {
        if !is_valid_subject_class(sc) {
            return Err(malformed(text, "subject-class must be two uppercase letters"));
        }
    }

    let digits_end = serial
        .find(|c: char| !c.is_ascii_digit())
        .unwrap_or(serial.len());
    let (digits, suffix) = serial.split_at(digits_end);
    if digits.len() != 7 {
        return Err(malformed(text, "serial part must be YYMMNNN"));
    }
    let yymm: u16 = digits[..4].parse().expect("ascii digits");
    let number: u16 = digits[4..].parse().expect("ascii digits");

    let version = if suffix.is_empty() {
        None
    } else {
        let n = suffix
            .strip_prefix('v')
            .filter(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) && !n.starts_with('0'))
            .ok_or_else(|| malformed(text, "bad version suffix"))?;
        Some(n.parse::<u32>().map_err(|_| malformed(text, "version out of range"))?)
    };

    if !(1..=12).contains(&(yymm % 100)) {
        return Err(malformed(text, "invalid month"));
    }
    if number == 0 {
        return Err(malformed(text, "serial 000 is not used"));
    }
    EprintId::new(archive, subject_class, yymm, number, version)
}

/// An `oai:<repository>:<local>` identifier. The local part never has a
/// version suffix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OaiIdentifier {
    repository: String,
    local: EprintId,
}

pub const OAI_SCHEME: &str = "oai";

impl OaiIdentifier {
    pub fn repository(&self) -> &str {
        &self.repository
    }

    pub fn local(&self) -> &EprintId {
        &self.local
    }

    pub fn into_local(self) -> EprintId {
        self.local
    }
}

impl fmt::Display for OaiIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{OAI_SCHEME}:{}:{}", self.repository, self.local)
    }
}

/// Map an internal id to its OAI form, dropping any version suffix.
pub fn to_oai_identifier(id: &EprintId, repository: &str) -> OaiIdentifier {
    OaiIdentifier {
        repository: repository.to_owned(),
        local: id.unversioned(),
    }
}

/// Inverse of [`to_oai_identifier`] for `repository`.
pub fn parse_oai_identifier(text: &str, repository: &str) -> Result<EprintId, IdError> {
    let rest = text
        .strip_prefix(OAI_SCHEME)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| IdError::WrongScheme(text.to_owned()))?;
    let (repo, local) = rest
        .split_once(':')
        .ok_or_else(|| IdError::WrongScheme(text.to_owned()))?;
    if repo != repository {
        return Err(IdError::WrongRepository {
            input: text.to_owned(),
            expected: repository.to_owned(),
            found: repo.to_owned(),
        });
    }
    let id = parse_internal_id(local).map_err(|e| IdError::MalformedLocalPart {
        input: text.to_owned(),
        source: Box::new(e),
    })?;
    if id.version().is_some() {
        return Err(IdError::MalformedLocalPart {
            input: text.to_owned(),
            source: Box::new(malformed(local, "OAI identifiers carry no version")),
        });
    }
    Ok(id)
}
