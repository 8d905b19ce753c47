//! Synthetic corpora with an independently maintained expectation model.
//!
//! The model tracks, per e-print, what a full unpaginated listing must show:
//! datestamp is the latest event date, deletion wins, sets are the groups of
//! the primary archive and of any cross-list, order is datestamp then OAI
//! identifier.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Datelike, Duration, NaiveDate, TimeZone, Utc};
use eprint_oai::id::parse_internal_id;
use eprint_oai::store::Store;
use rand::Rng;

pub struct ArchiveSpec {
    pub name: &'static str,
    pub group: &'static str,
    pub classes: &'static [&'static str],
}

pub const ARCHIVES: &[ArchiveSpec] = &[
    ArchiveSpec { name: "hep-th", group: "physics", classes: &[] },
    ArchiveSpec { name: "astro-ph", group: "physics", classes: &[] },
    ArchiveSpec { name: "quant-ph", group: "physics", classes: &[] },
    ArchiveSpec { name: "math", group: "math", classes: &["AG", "DS", "LO"] },
    ArchiveSpec { name: "funct-an", group: "math", classes: &[] },
    ArchiveSpec { name: "cs", group: "cs", classes: &["DL", "SE"] },
    ArchiveSpec { name: "nlin", group: "nlin", classes: &["SI", "CD"] },
];

pub const GROUPS: &[&str] = &["nlin", "math", "physics", "cs"];

pub const REPOSITORY: &str = "arXiv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub identifier: String,
    pub datestamp: NaiveDate,
    pub deleted: bool,
    pub groups: BTreeSet<&'static str>,
    pub title: String,
}

#[derive(Debug, Clone)]
pub enum Event {
    Ingest { at: DateTime<Utc>, id: String, bytes: Vec<u8> },
    Delete { at: DateTime<Utc>, id: String },
}

impl Event {
    pub fn at(&self) -> DateTime<Utc> {
        match self {
            Self::Ingest { at, .. } | Self::Delete { at, .. } => *at,
        }
    }
}

/// One synthetic e-print as the generator sees it.
#[derive(Debug, Clone)]
pub struct Paper {
    pub id: String,
    pub submissions: Vec<DateTime<Utc>>,
    pub title: String,
    pub authors: String,
    pub journal_ref: Option<String>,
    pub crosslist: Option<(String, &'static str)>,
    pub group: &'static str,
    pub serial: usize,
}

pub fn date_line(at: DateTime<Utc>) -> String {
    at.format("%a, %-d %b %Y %H:%M:%S GMT").to_string()
}

impl Paper {
    pub fn abs(&self) -> String {
        let mut s = format!("Paper: {}\nFrom: Synthetic Author <author@example.org>\n", self.id);
        for (i, d) in self.submissions.iter().enumerate() {
            if i == 0 {
                s.push_str(&format!("Date: {}   (10kb)\n", date_line(*d)));
            } else {
                s.push_str(&format!("Date (v{}): {}   (11kb)\n", i + 1, date_line(*d)));
            }
        }
        s.push_str(&format!("Title: {}\nAuthors: {}\n", self.title, self.authors));
        if let Some(j) = &self.journal_ref {
            s.push_str(&format!("Journal-ref: {j}\n"));
        }
        if let Some((c, _)) = &self.crosslist {
            s.push_str(&format!("Subj-class: {c}\n"));
        }
        s.push_str(&format!("\\\\\n  Abstract of synthetic record {}.\n", self.serial));
        s
    }

    pub fn groups(&self) -> BTreeSet<&'static str> {
        let mut g = BTreeSet::from([self.group]);
        if let Some((_, cg)) = &self.crosslist {
            g.insert(cg);
        }
        g
    }
}

pub fn identifier(id: &str) -> String {
    format!("oai:{REPOSITORY}:{id}")
}

/// Issues ids that are unique per archive and month.
#[derive(Default)]
pub struct IdMint {
    next: HashMap<(String, String), u32>,
}

impl IdMint {
    pub fn mint(&mut self, archive: &ArchiveSpec, class: Option<&str>, submitted: DateTime<Utc>) -> String {
        let yymm = format!("{:02}{:02}", submitted.year() % 100, submitted.month());
        let n = self.next.entry((archive.name.to_owned(), yymm.clone())).or_insert(0);
        *n += 1;
        assert!(*n <= 999, "too many synthetic records in one archive-month");
        match class {
            Some(c) => format!("{}.{c}/{yymm}{:03}", archive.name, n),
            None => format!("{}/{yymm}{:03}", archive.name, n),
        }
    }
}

pub fn random_paper(rng: &mut impl Rng, mint: &mut IdMint, serial: usize, submitted: DateTime<Utc>) -> Paper {
    let archive = &ARCHIVES[rng.random_range(0..ARCHIVES.len())];
    let class = (!archive.classes.is_empty()).then(|| archive.classes[rng.random_range(0..archive.classes.len())]);
    let id = mint.mint(archive, class, submitted);
    let crosslist = rng.random_bool(0.2).then(|| {
        let other = &ARCHIVES[rng.random_range(0..ARCHIVES.len())];
        let cat = match other.classes.first() {
            Some(c) => format!("{}.{c}", other.name),
            None => other.name.to_owned(),
        };
        (cat, other.group)
    });
    Paper {
        id,
        submissions: vec![submitted],
        title: format!("Synthetic study number {serial}"),
        authors: format!("A. Author{serial} and B. Writer"),
        journal_ref: None,
        crosslist,
        group: archive.group,
        serial,
    }
}

pub struct Corpus {
    /// In time order.
    pub events: Vec<Event>,
    pub model: BTreeMap<String, Expected>,
}

fn random_time(rng: &mut impl Rng, start: DateTime<Utc>, span_days: i64) -> DateTime<Utc> {
    start + Duration::seconds(rng.random_range(0..span_days * 86_400))
}

/// `n` e-prints submitted over 1992-2001; about a fifth are revised later
/// and a twentieth deleted after that.
pub fn random_corpus(rng: &mut impl Rng, n: usize) -> Corpus {
    let start = Utc.with_ymd_and_hms(1992, 1, 1, 0, 0, 0).unwrap();
    let mut mint = IdMint::default();
    let mut events = Vec::new();
    let mut model = BTreeMap::new();
    for serial in 0..n {
        let submitted = random_time(rng, start, 3650);
        let mut paper = random_paper(rng, &mut mint, serial, submitted);
        let received = submitted + Duration::seconds(rng.random_range(0..3 * 86_400));
        events.push(Event::Ingest {
            at: received,
            id: paper.id.clone(),
            bytes: paper.abs().into_bytes(),
        });
        let mut last = received;
        if rng.random_bool(0.2) {
            last += Duration::seconds(rng.random_range(3_600..400 * 86_400));
            if rng.random_bool(0.5) {
                paper.submissions.push(last);
            } else {
                paper.journal_ref = Some(format!("J. Synth. {} ({})", serial, last.year()));
            }
            events.push(Event::Ingest {
                at: last,
                id: paper.id.clone(),
                bytes: paper.abs().into_bytes(),
            });
        }
        let deleted = rng.random_bool(0.05);
        if deleted {
            last += Duration::seconds(rng.random_range(3_600..200 * 86_400));
            events.push(Event::Delete {
                at: last,
                id: paper.id.clone(),
            });
        }
        model.insert(
            paper.id.clone(),
            Expected {
                identifier: identifier(&paper.id),
                datestamp: last.date_naive(),
                deleted,
                groups: paper.groups(),
                title: paper.title.clone(),
            },
        );
    }
    events.sort_by_key(Event::at);
    Corpus { events, model }
}

pub fn apply(store: &Store, events: &[Event]) {
    for e in events {
        match e {
            Event::Ingest { at, id, bytes } => {
                store
                    .ingest(bytes, *at)
                    .unwrap_or_else(|err| panic!("ingest {id}: {err}"));
            }
            Event::Delete { at, id } => store
                .mark_deleted(&parse_internal_id(id).unwrap(), "synthetic", *at)
                .unwrap_or_else(|err| panic!("delete {id}: {err}")),
        }
    }
}

/// What an unpaginated listing must contain, in order.
pub fn oracle_scan(
    model: &BTreeMap<String, Expected>,
    from: Option<NaiveDate>,
    until: Option<NaiveDate>,
    set: Option<&str>,
) -> Vec<Expected> {
    let mut v: Vec<Expected> = model
        .values()
        .filter(|e| from.is_none_or(|f| e.datestamp >= f))
        .filter(|e| until.is_none_or(|u| e.datestamp <= u))
        .filter(|e| set.is_none_or(|s| e.groups.contains(s)))
        .cloned()
        .collect();
    v.sort_by(|a, b| (a.datestamp, &a.identifier).cmp(&(b.datestamp, &b.identifier)));
    v
}
