//! The plain-text per-record metadata file.
//!
//! ```text
//! Paper: cs.DL/0101042
//! From: Jane Q Roe <jroe@example.org>
//! Date: Tue, 23 Jan 2001 18:43:21 GMT   (12kb)
//! Date (v2): Thu, 25 Jan 2001 10:00:00 GMT   (13kb)
//! Title: Metadata exchange between
//!   e-print servers
//! Authors: Jane Q Roe
//! Comments: 15 pages
//! Journal-ref: ...
//! Subj-class: cs.IR, math.HO
//! \\
//!   Abstract text up to end of file.
//! ```
//!
//! Continuation lines start with two spaces and are joined to the previous
//! value with a single space. `Subj-class` lists cross-list categories,
//! comma separated.

use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::id::{parse_internal_id, EprintId};
use crate::taxonomy::CategoryRef;

pub const SEPARATOR: &str = "\\\\";

/// How submission dates are written, e.g. `Tue, 23 Jan 2001 18:43:21 GMT`.
pub const DATE_FORMAT: &str = "%a, %-d %b %Y %H:%M:%S GMT";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {message}", field.as_ref().map(|f| format!(" ({f})")).unwrap_or_default())]
pub struct ParseError {
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submission {
    pub version: u32,
    pub date: DateTime<Utc>,
    /// Trailing size annotation such as `12kb`, kept verbatim.
    pub size: Option<String>,
}

/// The native metadata of one e-print, latest version.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalMetadata {
    /// Unversioned id; the version count is `submissions.len()`.
    pub id: EprintId,
    pub from: Option<String>,
    pub submissions: Vec<Submission>,
    pub title: String,
    pub authors_raw: String,
    pub comments: Option<String>,
    pub journal_ref: Option<String>,
    pub report_no: Option<String>,
    pub license: Option<String>,
    pub crosslists: Vec<CategoryRef>,
    pub abstract_text: String,
}

impl InternalMetadata {
    pub fn latest_version(&self) -> u32 {
        self.submissions.len() as u32
    }

    pub fn first_submitted(&self) -> DateTime<Utc> {
        self.submissions[0].date
    }
}

/// Identifier text that looks like an id but whose serial has more than
/// three digits.
pub(crate) fn is_serial_overflow(text: &str) -> bool {
    let serial = match text.split_once('/') {
        Some((_, s)) => s,
        None => return false,
    };
    let digits = serial.bytes().take_while(u8::is_ascii_digit).count();
    digits > 7
}

#[derive(Debug)]
pub(crate) enum AbsError {
    Parse(ParseError),
    SerialOverflow(String),
}

fn err(line: usize, field: Option<&str>, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        field: field.map(str::to_owned),
        message: message.into(),
    }
}

fn parse_date_value(value: &str, line: usize) -> Result<(DateTime<Utc>, Option<String>), ParseError> {
    let (date_part, size) = match value.rfind('(') {
        Some(open) if value.ends_with(')') => (
            value[..open].trim_end(),
            Some(value[open + 1..value.len() - 1].trim().to_owned()),
        ),
        _ => (value, None),
    };
    let date = DateTime::parse_from_rfc2822(date_part)
        .map_err(|e| err(line, Some("Date"), format!("bad date {date_part:?}: {e}")))?
        .with_timezone(&Utc);
    Ok((date, size))
}

/// `Date` or `Date (vN)`.
fn date_key_version(key: &str) -> Option<Option<u32>> {
    if key == "Date" {
        return Some(None);
    }
    let inner = key.strip_prefix("Date (v")?.strip_suffix(')')?;
    inner.parse().ok().filter(|v| *v >= 1).map(Some)
}

pub(crate) fn parse(bytes: &[u8]) -> Result<InternalMetadata, AbsError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        AbsError::Parse(err(line, None, "file is not valid UTF-8"))
    })?;

    // Collect (line number, key, value) with continuations folded in.
    let mut fields: Vec<(usize, String, String)> = Vec::new();
    let mut abstract_start = None;
    let mut offset = 0;
    for (n, raw_line) in text.split_inclusive('\n').enumerate() {
        let lineno = n + 1;
        offset += raw_line.len();
        let line = raw_line.trim_end_matches(['\n', '\r']);
        if line == SEPARATOR {
            abstract_start = Some((offset, lineno));
            break;
        }
        if let Some(cont) = line.strip_prefix("  ") {
            let Some(last) = fields.last_mut() else {
                return Err(AbsError::Parse(err(lineno, None, "continuation line before any field")));
            };
            let cont = cont.trim();
            if !cont.is_empty() {
                if !last.2.is_empty() {
                    last.2.push(' ');
                }
                last.2.push_str(cont);
            }
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(AbsError::Parse(err(lineno, None, format!("expected `Key: value`, got {line:?}"))));
        };
        fields.push((lineno, key.to_owned(), value.trim().to_owned()));
    }
    let Some((abstract_offset, sep_line)) = abstract_start else {
        return Err(AbsError::Parse(err(
            text.lines().count().max(1),
            None,
            "missing `\\\\` separator before the abstract",
        )));
    };

    let mut id = None;
    let mut from = None;
    let mut submissions: Vec<Submission> = Vec::new();
    let mut title = None;
    let mut authors = None;
    let mut comments = None;
    let mut journal_ref = None;
    let mut report_no = None;
    let mut license = None;
    let mut crosslists = None;

    for (lineno, key, value) in fields {
        let slot = match key.as_str() {
            "Paper" => {
                if id.is_some() {
                    return Err(AbsError::Parse(err(lineno, Some("Paper"), "repeated field")));
                }
                if is_serial_overflow(&value) {
                    return Err(AbsError::SerialOverflow(value));
                }
                let parsed = parse_internal_id(&value)
                    .map_err(|e| AbsError::Parse(err(lineno, Some("Paper"), e.to_string())))?;
                id = Some(parsed.unversioned());
                continue;
            }
            "From" => &mut from,
            "Title" => &mut title,
            "Authors" => &mut authors,
            "Comments" => &mut comments,
            "Journal-ref" => &mut journal_ref,
            "Report-no" => &mut report_no,
            "License" => &mut license,
            "Subj-class" => {
                if crosslists.is_some() {
                    return Err(AbsError::Parse(err(lineno, Some("Subj-class"), "repeated field")));
                }
                let cats = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<CategoryRef>()
                            .map_err(|e| AbsError::Parse(err(lineno, Some("Subj-class"), e.to_string())))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                crosslists = Some(cats);
                continue;
            }
            other => match date_key_version(other) {
                Some(explicit) => {
                    let expected = submissions.len() as u32 + 1;
                    let version = explicit.unwrap_or(1);
                    if version != expected {
                        return Err(AbsError::Parse(err(
                            lineno,
                            Some(other),
                            format!("expected date for version {expected}, got version {version}"),
                        )));
                    }
                    let (date, size) = parse_date_value(&value, lineno).map_err(AbsError::Parse)?;
                    submissions.push(Submission { version, date, size });
                    continue;
                }
                None => {
                    return Err(AbsError::Parse(err(lineno, Some(other), "unknown field")));
                }
            },
        };
        if slot.is_some() {
            return Err(AbsError::Parse(err(lineno, Some(&key), "repeated field")));
        }
        *slot = Some(value);
    }

    let missing = |f: &str| AbsError::Parse(err(sep_line, Some(f), "required field missing"));
    let id = id.ok_or_else(|| missing("Paper"))?;
    let title = title.filter(|t| !t.is_empty()).ok_or_else(|| missing("Title"))?;
    let authors_raw = authors.filter(|a| !a.is_empty()).ok_or_else(|| missing("Authors"))?;
    if submissions.is_empty() {
        return Err(missing("Date"));
    }

    let abstract_text = text[abstract_offset..].trim_end().to_owned();
    if abstract_text.trim().is_empty() {
        return Err(AbsError::Parse(err(sep_line + 1, Some("abstract"), "empty abstract")));
    }

    let none_if_empty = |v: Option<String>| v.filter(|s| !s.is_empty());
    Ok(InternalMetadata {
        id,
        from: none_if_empty(from),
        submissions,
        title,
        authors_raw,
        comments: none_if_empty(comments),
        journal_ref: none_if_empty(journal_ref),
        report_no: none_if_empty(report_no),
        license: none_if_empty(license),
        crosslists: crosslists.unwrap_or_default(),
        abstract_text,
    })
}

/// Render metadata back into the file format. Values are written on one line.
pub fn render(meta: &InternalMetadata) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Paper: {}", meta.id);
    if let Some(from) = &meta.from {
        let _ = writeln!(out, "From: {from}");
    }
    for s in &meta.submissions {
        let key = if s.version == 1 {
            "Date".to_owned()
        } else {
            format!("Date (v{})", s.version)
        };
        let _ = write!(out, "{key}: {}", s.date.format(DATE_FORMAT));
        if let Some(size) = &s.size {
            let _ = write!(out, "   ({size})");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "Title: {}", meta.title);
    let _ = writeln!(out, "Authors: {}", meta.authors_raw);
    for (key, value) in [
        ("Comments", &meta.comments),
        ("Journal-ref", &meta.journal_ref),
        ("Report-no", &meta.report_no),
        ("License", &meta.license),
    ] {
        if let Some(v) = value {
            let _ = writeln!(out, "{key}: {v}");
        }
    }
    if !meta.crosslists.is_empty() {
        let cats: Vec<String> = meta.crosslists.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "Subj-class: {}", cats.join(", "));
    }
    out.push_str(SEPARATOR);
    out.push('\n');
    out.push_str(&meta.abstract_text);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "Paper: cs.DL/0101042
From: Jane Q Roe <jroe@example.org>
Date: Tue, 23 Jan 2001 18:43:21 GMT   (12kb)
Title: Metadata exchange between
  e-print servers
Authors: Jane Q Roe
Comments: 15 pages. Expanded version of a talk given at a
  workshop in Geneva on 23 January 2001
\\\\
  We describe how two e-print servers exchange metadata
over a simple request protocol.
";

    fn parse_ok(text: &str) -> InternalMetadata {
        match parse(text.as_bytes()) {
            Ok(m) => m,
            Err(e) => panic!("{e:?}"),
        }
    }

    fn parse_err(text: &str) -> ParseError {
        match parse(text.as_bytes()) {
            Err(AbsError::Parse(e)) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_sample() {
        let m = parse_ok(SAMPLE);
        assert_eq!(m.id.to_string(), "cs.DL/0101042");
        assert_eq!(m.title, "Metadata exchange between e-print servers");
        assert_eq!(m.authors_raw, "Jane Q Roe");
        assert_eq!(m.submissions.len(), 1);
        assert_eq!(m.submissions[0].size.as_deref(), Some("12kb"));
        assert_eq!(m.submissions[0].date.to_rfc3339(), "2001-01-23T18:43:21+00:00");
        assert!(m.comments.unwrap().ends_with("workshop in Geneva on 23 January 2001"));
        assert!(m.abstract_text.starts_with("  We describe"));
        assert!(m.abstract_text.ends_with("request protocol."));
        assert!(m.crosslists.is_empty());
    }

    #[test]
    fn versions_and_crosslists() {
        let text = SAMPLE.replace(
            "Title:",
            "Date (v2): Thu, 25 Jan 2001 10:00:00 GMT   (13kb)\nSubj-class: cs.IR, math.HO\nTitle:",
        );
        let m = parse_ok(&text);
        assert_eq!(m.latest_version(), 2);
        assert_eq!(m.crosslists.len(), 2);
        assert_eq!(m.crosslists[1].to_string(), "math.HO");
    }

    #[test]
    fn missing_title() {
        let text: String = SAMPLE
            .lines()
            .filter(|l| !l.starts_with("Title") && !l.starts_with("  e-print servers"))
            .map(|l| format!("{l}\n"))
            .collect();
        let e = parse_err(&text);
        assert_eq!(e.field.as_deref(), Some("Title"));
    }

    #[test]
    fn diagnostics_name_the_line() {
        let e = parse_err(&SAMPLE.replace("Authors:", "Authorz:"));
        assert_eq!(e.line, 6);
        assert_eq!(e.field.as_deref(), Some("Authorz"));
        let e = parse_err(&SAMPLE.replace("(12kb)", "").replace("Tue, 23 Jan", "Tue, 33 Jan"));
        assert_eq!(e.line, 3);
        let e = parse_err(SAMPLE.split("\\\\").next().unwrap());
        assert!(e.message.contains("separator"));
        let e = parse_err(&SAMPLE.replace("Title:", "Date (v3): Thu, 25 Jan 2001 10:00:00 GMT\nTitle:"));
        assert!(e.message.contains("version 2"));
    }

    #[test]
    fn serial_overflow_is_distinguished() {
        let text = SAMPLE.replace("cs.DL/0101042", "cs.DL/01011000");
        assert!(matches!(parse(text.as_bytes()), Err(AbsError::SerialOverflow(_))));
        let text = SAMPLE.replace("cs.DL/0101042", "cs.DL/0101000");
        assert!(matches!(parse(text.as_bytes()), Err(AbsError::Parse(_))));
    }

    #[test]
    fn render_round_trips() {
        let m = parse_ok(SAMPLE);
        assert_eq!(parse_ok(&render(&m)), m);
    }
}
