//! Harvesting client.
//!
//! [`run`] issues one list request and follows resumption tokens verbatim
//! until a page arrives without one. A 503 is answered by sleeping the
//! advertised delay and sending the same request again. [`incremental`] picks
//! the `from` date out of a [`HarvestState`] and merges the result into a
//! [`LocalStore`].

mod local;
mod parse;
mod state;
mod transport;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use local::{LocalStore, LocalStoreError, UpsertStats, COMPACTED_FILE, JOURNAL_FILE};
pub use parse::HarvestedRecord;
pub use state::{state_key, HarvestState};
pub use transport::{
    ClockSleeper, HttpTransport, LoopbackTransport, Sleeper, ThreadSleeper, Transport, TransportError,
    TransportResponse,
};

use crate::datestamp::Datestamp;

/// Wait used when a 503 carries no usable Retry-After, and between
/// transport-level retries.
pub const DEFAULT_RETRY_WAIT: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HarvestVerb {
    ListIdentifiers,
    ListRecords { metadata_prefix: String },
}

impl HarvestVerb {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ListIdentifiers => "ListIdentifiers",
            Self::ListRecords { .. } => "ListRecords",
        }
    }

    pub fn metadata_prefix(&self) -> Option<&str> {
        match self {
            Self::ListIdentifiers => None,
            Self::ListRecords { metadata_prefix } => Some(metadata_prefix),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarvestJob {
    pub base_url: String,
    pub verb: HarvestVerb,
    pub from: Option<Datestamp>,
    pub until: Option<Datestamp>,
    pub set: Option<String>,
    /// Extra attempts allowed per request, shared by 503s and transport failures.
    pub max_retries: u32,
}

impl HarvestJob {
    pub fn new(base_url: &str, verb: HarvestVerb) -> Self {
        Self {
            base_url: base_url.to_owned(),
            verb,
            from: None,
            until: None,
            set: None,
            max_retries: 10,
        }
    }

    pub fn state_key(&self) -> String {
        state_key(&self.base_url, self.set.as_deref(), self.verb.metadata_prefix())
    }

    fn initial_args(&self) -> Vec<(String, String)> {
        let mut args = vec![("verb".to_owned(), self.verb.name().to_owned())];
        if let Some(p) = self.verb.metadata_prefix() {
            args.push(("metadataPrefix".into(), p.to_owned()));
        }
        if let Some(d) = self.from {
            args.push(("from".into(), d.to_string()));
        }
        if let Some(d) = self.until {
            args.push(("until".into(), d.to_string()));
        }
        if let Some(s) = &self.set {
            args.push(("set".into(), s.clone()));
        }
        args
    }

    fn resume_args(&self, token: &str) -> Vec<(String, String)> {
        vec![
            ("verb".to_owned(), self.verb.name().to_owned()),
            ("resumptionToken".to_owned(), token.to_owned()),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HarvestReport {
    /// Identifiers received, counting repeats across pages.
    pub fetched: usize,
    pub deleted: usize,
    /// Pages that parsed.
    pub pages: usize,
    pub unavailable_503: usize,
    pub transport_retries: usize,
    /// Total time handed to the sleeper.
    pub waited: Duration,
    pub elapsed: Duration,
    /// Identifiers seen more than once. The provider's index can change
    /// between pages; the harvest keeps going with the token it was given.
    pub duplicates: usize,
}

impl std::fmt::Display for HarvestReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "fetched={} deleted={} pages={} 503s={} transport_retries={} duplicates={} waited={:.3}s elapsed={:.3}s",
            self.fetched,
            self.deleted,
            self.pages,
            self.unavailable_503,
            self.transport_retries,
            self.duplicates,
            self.waited.as_secs_f64(),
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct HarvestOutcome {
    pub records: Vec<HarvestedRecord>,
    pub report: HarvestReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarvestErrorKind {
    #[error("{0} (retries exhausted)")]
    Transport(TransportError),
    #[error("still unavailable after {0} retries")]
    Unavailable(u32),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unreadable response: {0}")]
    Protocol(String),
    #[error("local store: {0}")]
    Storage(String),
}

/// A failed harvest, carrying whatever arrived before the failure.
#[derive(Debug, Clone, Error)]
#[error("harvest of {url} failed after {pages} page(s): {kind}", pages = partial.report.pages)]
pub struct HarvestError {
    pub url: String,
    pub kind: HarvestErrorKind,
    pub partial: Box<HarvestOutcome>,
}

fn fetch(
    job: &HarvestJob,
    args: &[(String, String)],
    transport: &dyn Transport,
    sleeper: &dyn Sleeper,
    report: &mut HarvestReport,
) -> Result<String, HarvestErrorKind> {
    let mut attempts = 0u32;
    loop {
        let (wait, failure) = match transport.get(&job.base_url, args) {
            Ok(r) if r.status == 200 => return Ok(r.body),
            Ok(r) if r.status == 503 => {
                report.unavailable_503 += 1;
                (r.retry_after.unwrap_or(DEFAULT_RETRY_WAIT), HarvestErrorKind::Unavailable(job.max_retries))
            }
            Ok(r) => {
                return Err(HarvestErrorKind::Status {
                    status: r.status,
                    body: r.body.chars().take(200).collect(),
                })
            }
            Err(e) => {
                report.transport_retries += 1;
                (DEFAULT_RETRY_WAIT, HarvestErrorKind::Transport(e))
            }
        };
        if attempts >= job.max_retries {
            return Err(failure);
        }
        attempts += 1;
        report.waited += wait;
        sleeper.sleep(wait);
    }
}

/// Harvest everything `job` selects.
pub fn run(job: &HarvestJob, transport: &dyn Transport, sleeper: &dyn Sleeper) -> Result<HarvestOutcome, HarvestError> {
    let started = Instant::now();
    let mut out = HarvestOutcome::default();
    let mut seen = std::collections::HashSet::new();
    let mut args = job.initial_args();
    loop {
        let page = fetch(job, &args, transport, sleeper, &mut out.report)
            .and_then(|body| parse::parse_list(&body, job.verb.name()).map_err(HarvestErrorKind::Protocol));
        let page = match page {
            Ok(p) => p,
            Err(kind) => {
                out.report.elapsed = started.elapsed();
                return Err(HarvestError {
                    url: job.base_url.clone(),
                    kind,
                    partial: Box::new(out),
                });
            }
        };
        out.report.pages += 1;
        for r in page.records {
            out.report.fetched += 1;
            out.report.deleted += usize::from(r.deleted);
            if !seen.insert(r.identifier.clone()) {
                out.report.duplicates += 1;
            }
            out.records.push(r);
        }
        match page.token {
            Some(t) => args = job.resume_args(&t),
            None => break,
        }
    }
    out.report.elapsed = started.elapsed();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Overlap {
    /// Start one day before the last completed harvest date, so changes made
    /// later on that day are picked up.
    #[default]
    OneDay,
    /// Start the day after the last completed harvest date. Misses records
    /// changed on that date after the harvest ran.
    Disabled,
}

#[derive(Debug, Clone)]
pub struct IncrementalOutcome {
    pub state: HarvestState,
    pub outcome: HarvestOutcome,
    pub upserted: UpsertStats,
    /// The `from` actually requested.
    pub from: Option<Datestamp>,
}

/// The `from` an incremental run requests, or the template's own when the
/// key was never harvested.
pub fn incremental_from(state: &HarvestState, template: &HarvestJob, overlap: Overlap) -> Option<Datestamp> {
    match (state.last(&template.state_key()), overlap) {
        (None, _) => template.from,
        (Some(last), Overlap::OneDay) => Some(last.pred()),
        (Some(last), Overlap::Disabled) => Some(last.succ()),
    }
}

/// Run `template` from the stored date, merge into `local`, and return the
/// state advanced to `today`. On failure neither the state nor `local` changes.
pub fn incremental(
    state: &HarvestState,
    template: &HarvestJob,
    today: Datestamp,
    overlap: Overlap,
    local: &mut LocalStore,
    transport: &dyn Transport,
    sleeper: &dyn Sleeper,
) -> Result<IncrementalOutcome, HarvestError> {
    let from = incremental_from(state, template, overlap);
    let job = HarvestJob {
        from,
        ..template.clone()
    };
    let outcome = run(&job, transport, sleeper)?;
    let upserted = local.upsert_all(&outcome.records).map_err(|e| HarvestError {
        url: job.base_url.clone(),
        kind: HarvestErrorKind::Storage(e.to_string()),
        partial: Box::new(outcome.clone()),
    })?;
    let mut state = state.clone();
    state.advance(&job.state_key(), today);
    Ok(IncrementalOutcome {
        state,
        outcome,
        upserted,
        from,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;

    /// Replays canned responses and records every request.
    struct Script {
        responses: Mutex<Vec<Result<TransportResponse, TransportError>>>,
        seen: Mutex<Vec<Vec<(String, String)>>>,
    }

    impl Script {
        fn new(mut responses: Vec<Result<TransportResponse, TransportError>>) -> Self {
            responses.reverse();
            Self {
                responses: Mutex::new(responses),
                seen: Mutex::new(Vec::new()),
            }
        }
    }

    impl Transport for Script {
        fn get(&self, _: &str, args: &[(String, String)]) -> Result<TransportResponse, TransportError> {
            self.seen.lock().unwrap().push(args.to_vec());
            self.responses.lock().unwrap().pop().expect("script exhausted")
        }
    }

    #[derive(Default)]
    struct Tally(Mutex<Vec<Duration>>);

    impl Sleeper for Tally {
        fn sleep(&self, wait: Duration) {
            self.0.lock().unwrap().push(wait);
        }
    }

    fn ok(body: String) -> Result<TransportResponse, TransportError> {
        Ok(TransportResponse {
            status: 200,
            body,
            retry_after: None,
        })
    }

    fn busy(secs: u64) -> Result<TransportResponse, TransportError> {
        Ok(TransportResponse {
            status: 503,
            body: String::new(),
            retry_after: Some(Duration::from_secs(secs)),
        })
    }

    fn ids_page(ids: &[&str], token: Option<&str>) -> String {
        let mut s = String::from("<ListIdentifiers>");
        for id in ids {
            s.push_str(&format!("<identifier>{id}</identifier>"));
        }
        if let Some(t) = token {
            s.push_str(&format!("<resumptionToken>{t}</resumptionToken>"));
        }
        s.push_str("</ListIdentifiers>");
        s
    }

    fn job() -> HarvestJob {
        HarvestJob::new("http://example.org/oai1", HarvestVerb::ListIdentifiers)
    }

    #[test]
    fn follows_tokens_verbatim_and_obeys_503() {
        let script = Script::new(vec![
            ok(ids_page(&["a", "b"], Some("opaque token 1"))),
            busy(2),
            ok(ids_page(&["c"], Some("t2"))),
            ok(ids_page(&[], None)),
        ]);
        let sleeper = Tally::default();
        let out = run(&job(), &script, &sleeper).unwrap();
        assert_eq!(out.records.iter().map(|r| r.identifier.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(out.report.pages, 3);
        assert_eq!(out.report.unavailable_503, 1);
        assert_eq!(*sleeper.0.lock().unwrap(), [Duration::from_secs(2)]);
        let seen = script.seen.lock().unwrap();
        assert_eq!(seen.len(), 4);
        assert_eq!(seen[1], seen[2], "503 retries the same request");
        assert_eq!(seen[1][1], ("resumptionToken".to_owned(), "opaque token 1".to_owned()));
        assert_eq!(seen[3][1].1, "t2");
    }

    #[test]
    fn failures_keep_partial_progress() {
        let script = Script::new(vec![ok(ids_page(&["a"], Some("t"))), busy(1), busy(1)]);
        let j = HarvestJob { max_retries: 1, ..job() };
        let e = run(&j, &script, &Tally::default()).unwrap_err();
        assert_eq!(e.kind, HarvestErrorKind::Unavailable(1));
        assert_eq!(e.partial.records.len(), 1);

        let script = Script::new(vec![ok("<oops".into())]);
        let e = run(&job(), &script, &Tally::default()).unwrap_err();
        assert!(matches!(e.kind, HarvestErrorKind::Protocol(_)));

        let script = Script::new(vec![Ok(TransportResponse {
            status: 400,
            body: "bad".into(),
            retry_after: None,
        })]);
        let e = run(&job(), &script, &Tally::default()).unwrap_err();
        assert!(matches!(e.kind, HarvestErrorKind::Status { status: 400, .. }));

        let refused = || {
            Err(TransportError {
                url: "u".into(),
                message: "refused".into(),
            })
        };
        let script = Script::new(vec![refused(), refused(), refused()]);
        let j = HarvestJob { max_retries: 2, ..job() };
        let e = run(&j, &script, &Tally::default()).unwrap_err();
        assert!(matches!(e.kind, HarvestErrorKind::Transport(_)));
        assert_eq!(e.partial.report.transport_retries, 3);
    }

    #[test]
    fn incremental_window_and_state() {
        let d = |s: &str| s.parse::<Datestamp>().unwrap();
        let mut state = HarvestState::new();
        let j = job();
        assert_eq!(incremental_from(&state, &j, Overlap::OneDay), None);
        state.advance(&j.state_key(), d("2001-01-20"));
        assert_eq!(incremental_from(&state, &j, Overlap::OneDay), Some(d("2001-01-19")));
        assert_eq!(incremental_from(&state, &j, Overlap::Disabled), Some(d("2001-01-21")));

        let mut local = LocalStore::in_memory();
        let script = Script::new(vec![busy(1), busy(1)]);
        let j0 = HarvestJob { max_retries: 1, ..j.clone() };
        assert!(incremental(&state, &j0, d("2001-01-22"), Overlap::OneDay, &mut local, &script, &Tally::default()).is_err());
        assert_eq!(state.last(&j.state_key()), Some(d("2001-01-20")));

        let script = Script::new(vec![ok(ids_page(&["x"], None))]);
        let r = incremental(&state, &j, d("2001-01-22"), Overlap::OneDay, &mut local, &script, &Tally::default()).unwrap();
        assert_eq!(r.state.last(&j.state_key()), Some(d("2001-01-22")));
        assert_eq!(script.seen.lock().unwrap()[0][1], ("from".to_owned(), "2001-01-19".to_owned()));
        assert_eq!(local.len(), 1);
    }
}
