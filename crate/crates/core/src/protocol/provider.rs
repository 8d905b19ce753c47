use std::io;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use quick_xml::events::BytesText;

use super::request::{parse_request, ListSelection, OaiRequest, Verb};
use super::token::ResumptionToken;
use super::{verb_namespace, RepositoryConfig, VerbResponse, CONTENT_TYPE_HTML};
use crate::clock::Clock;
use crate::crosswalk::{Crosswalk, FormatKind};
use crate::datestamp::Datestamp;
use crate::flowcontrol::{Admission, FlowControl};
use crate::id::{parse_oai_identifier, to_oai_identifier};
use crate::store::{IndexEntry, Lookup, Store, StoreView};
use crate::taxonomy::SetSpec;
use crate::xml::{self, text_element, XmlWriter, XSI_NS};

const OAI_IDENTIFIER_NS: &str = "http://www.openarchives.org/OAI/oai-identifier";
const EPRINTS_NS: &str = "http://www.openarchives.org/OAI/eprints";

/// Answers protocol requests against one store.
#[derive(Clone)]
pub struct Provider {
    store: Arc<Store>,
    config: Arc<RepositoryConfig>,
    crosswalk: Arc<Crosswalk>,
    clock: Arc<dyn Clock>,
    flow: Option<FlowControl>,
}

impl std::fmt::Debug for Provider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Provider")
            .field("store", &self.store)
            .field("base_url", &self.config.base_url)
            .field("flow", &self.flow)
            .finish()
    }
}

struct Page<'a> {
    entries: Vec<&'a IndexEntry>,
    next_from: Option<Datestamp>,
}

struct ListArgs {
    from: Option<Datestamp>,
    until: Option<Datestamp>,
    set: Option<SetSpec>,
}

impl From<ListSelection> for ListArgs {
    fn from(sel: ListSelection) -> Self {
        match sel {
            ListSelection::Initial { from, until, set } => Self { from, until, set },
            ListSelection::Resume(t) => Self {
                from: Some(t.next_from),
                until: t.until,
                set: t.set,
            },
        }
    }
}

enum RecordOutcome<'m> {
    Deleted,
    HeaderOnly,
    Full(&'m crate::crosswalk::MetadataRecord),
}

fn response_date(now: DateTime<Utc>) -> String {
    now.format("%Y-%m-%dT%H:%M:%S+00:00").to_string()
}

fn write_header(w: &mut XmlWriter, identifier: &str, datestamp: Datestamp) -> io::Result<()> {
    w.create_element("header").write_inner_content(|w| {
        text_element(w, "identifier", identifier)?;
        text_element(w, "datestamp", &datestamp.to_string())
    })?;
    Ok(())
}

fn write_record(w: &mut XmlWriter, identifier: &str, datestamp: Datestamp, outcome: RecordOutcome<'_>) -> io::Result<()> {
    let el = w.create_element("record");
    let el = match outcome {
        RecordOutcome::Deleted => el.with_attribute(("status", "deleted")),
        _ => el,
    };
    el.write_inner_content(|w| {
        write_header(w, identifier, datestamp)?;
        if let RecordOutcome::Full(meta) = outcome {
            w.create_element("metadata").write_inner_content(|w| meta.write_xml(w))?;
        }
        Ok(())
    })?;
    Ok(())
}

impl Provider {
    pub fn new(store: Arc<Store>, config: Arc<RepositoryConfig>, crosswalk: Arc<Crosswalk>, clock: Arc<dyn Clock>) -> Self {
        Self {
            store,
            config,
            crosswalk,
            clock,
            flow: None,
        }
    }

    pub fn with_flow_control(mut self, flow: FlowControl) -> Self {
        self.flow = Some(flow);
        self
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn config(&self) -> &RepositoryConfig {
        &self.config
    }

    pub fn crosswalk(&self) -> &Crosswalk {
        &self.crosswalk
    }

    pub fn flow_control(&self) -> Option<&FlowControl> {
        self.flow.as_ref()
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    /// Handle an `application/x-www-form-urlencoded` argument string.
    pub fn handle_query(&self, client: &str, query: &str) -> VerbResponse {
        let pairs: Vec<(String, String)> = url::form_urlencoded::parse(query.as_bytes()).into_owned().collect();
        self.handle(client, &pairs)
    }

    /// Handle decoded keyword arguments from `client`.
    pub fn handle(&self, client: &str, pairs: &[(String, String)]) -> VerbResponse {
        let request = match parse_request(pairs) {
            Ok(OaiRequest::Document) => return self.document(),
            Ok(r) => r,
            Err(e) => return VerbResponse::malformed(&e.to_string()),
        };
        let format = match self.list_format(&request) {
            Ok(f) => f,
            Err(Malformed(m)) => return VerbResponse::malformed(&m),
        };
        let now = self.clock.now();
        if let Some(flow) = &self.flow {
            if let Admission::RetryAfter(wait) = flow.admit(client, request.verb().class(), now) {
                return VerbResponse::retry_after(wait);
            }
        }
        let request_url = self.request_url(pairs);
        let rendered = match request {
            OaiRequest::Identify => self.identify(&request_url, now),
            OaiRequest::ListSets => self.list_sets(&request_url, now),
            OaiRequest::ListMetadataFormats { identifier } => {
                self.list_metadata_formats(identifier.as_deref(), &request_url, now)
            }
            OaiRequest::GetRecord {
                identifier,
                metadata_prefix,
            } => self.get_record(&identifier, &metadata_prefix, &request_url, now),
            OaiRequest::ListIdentifiers(sel) => self.list_identifiers(sel, &request_url, now),
            OaiRequest::ListRecords { selection, .. } => {
                self.list_records(selection, format.expect("checked above"), &request_url, now)
            }
            OaiRequest::Document => unreachable!("answered above"),
        };
        match rendered {
            Ok(body) => VerbResponse::xml(body),
            Err(Malformed(m)) => VerbResponse::malformed(&m),
        }
    }

    /// Base URL plus the decoded arguments in the order received.
    pub fn request_url(&self, pairs: &[(String, String)]) -> String {
        let query: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}?{}", self.config.base_url, query.join("&"))
    }

    fn envelope(
        &self,
        verb: Verb,
        request_url: &str,
        now: DateTime<Utc>,
        body: impl FnOnce(&mut XmlWriter) -> io::Result<()>,
    ) -> String {
        let ns = verb_namespace(verb);
        let loc = format!("{ns} {ns}.xsd");
        let mut w = xml::document();
        w.create_element(verb.name())
            .with_attribute(("xmlns", ns.as_str()))
            .with_attribute(("xmlns:xsi", XSI_NS))
            .with_attribute(("xsi:schemaLocation", loc.as_str()))
            .write_inner_content(|w| {
                text_element(w, "responseDate", &response_date(now))?;
                text_element(w, "requestURL", request_url)?;
                body(w)
            })
            .expect("writing to a Vec cannot fail");
        xml::finish(w)
    }

    fn identify(&self, request_url: &str, now: DateTime<Utc>) -> Result<String, Malformed> {
        let c = &*self.config;
        Ok(self.envelope(Verb::Identify, request_url, now, |w| {
            text_element(w, "repositoryName", &c.repository_name)?;
            text_element(w, "baseURL", &c.base_url)?;
            text_element(w, "protocolVersion", &c.protocol_version)?;
            text_element(w, "adminEmail", &c.admin_email)?;
            w.create_element("description").write_inner_content(|w| {
                let loc = format!("{OAI_IDENTIFIER_NS} {OAI_IDENTIFIER_NS}.xsd");
                w.create_element("oai-identifier")
                    .with_attribute(("xmlns", OAI_IDENTIFIER_NS))
                    .with_attribute(("xmlns:xsi", XSI_NS))
                    .with_attribute(("xsi:schemaLocation", loc.as_str()))
                    .write_inner_content(|w| {
                        text_element(w, "scheme", &c.identifier.scheme)?;
                        text_element(w, "repositoryIdentifier", &c.identifier.repository_identifier)?;
                        text_element(w, "delimiter", &c.identifier.delimiter)?;
                        text_element(w, "sampleIdentifier", &c.identifier.sample_identifier)
                    })?;
                Ok(())
            })?;
            if let Some(e) = c.eprints() {
                w.create_element("description").write_inner_content(|w| {
                    let loc = format!("{EPRINTS_NS} {EPRINTS_NS}.xsd");
                    w.create_element("eprints")
                        .with_attribute(("xmlns", EPRINTS_NS))
                        .with_attribute(("xmlns:xsi", XSI_NS))
                        .with_attribute(("xsi:schemaLocation", loc.as_str()))
                        .write_inner_content(|w| {
                            for (name, policy) in [
                                ("content", &e.content),
                                ("metadataPolicy", &e.metadata_policy),
                                ("dataPolicy", &e.data_policy),
                                ("submissionPolicy", &e.submission_policy),
                            ] {
                                let Some(p) = policy else { continue };
                                w.create_element(name).write_inner_content(|w| {
                                    xml::opt_element(w, "text", p.text.as_deref())?;
                                    xml::opt_element(w, "URL", p.url.as_deref())
                                })?;
                            }
                            Ok(())
                        })?;
                    Ok(())
                })?;
            }
            Ok(())
        }))
    }

    fn list_sets(&self, request_url: &str, now: DateTime<Utc>) -> Result<String, Malformed> {
        let groups = self.store.taxonomy().groups();
        Ok(self.envelope(Verb::ListSets, request_url, now, |w| {
            for g in groups {
                w.create_element("set").write_inner_content(|w| {
                    text_element(w, "setSpec", &g.spec)?;
                    text_element(w, "setName", &g.name)
                })?;
            }
            Ok(())
        }))
    }

    fn lookup(&self, view: &StoreView<'_>, identifier: &str) -> Lookup {
        match parse_oai_identifier(identifier, self.store.repository()) {
            Ok(id) => view.get(&id),
            Err(_) => Lookup::NotFound,
        }
    }

    fn list_metadata_formats(
        &self,
        identifier: Option<&str>,
        request_url: &str,
        now: DateTime<Utc>,
    ) -> Result<String, Malformed> {
        let known = match identifier {
            Some(i) => !matches!(self.lookup(&self.store.read(), i), Lookup::NotFound),
            None => true,
        };
        let formats: Vec<_> = if known {
            self.crosswalk.formats().iter().collect()
        } else {
            Vec::new()
        };
        Ok(self.envelope(Verb::ListMetadataFormats, request_url, now, |w| {
            for d in &formats {
                w.create_element("metadataFormat").write_inner_content(|w| {
                    text_element(w, "metadataPrefix", d.prefix)?;
                    text_element(w, "schema", d.schema)?;
                    text_element(w, "metadataNamespace", d.namespace)
                })?;
            }
            Ok(())
        }))
    }

    fn get_record(&self, identifier: &str, prefix: &str, request_url: &str, now: DateTime<Utc>) -> Result<String, Malformed> {
        let view = self.store.read();
        let lookup = self.lookup(&view, identifier);
        drop(view);
        let repo = self.store.repository();
        Ok(self.envelope(Verb::GetRecord, request_url, now, |w| match &lookup {
            Lookup::NotFound => Ok(()),
            Lookup::Deleted { id, datestamp } => {
                write_record(w, &to_oai_identifier(id, repo).to_string(), *datestamp, RecordOutcome::Deleted)
            }
            Lookup::Found(rec) => {
                let ident = to_oai_identifier(&rec.meta.id, repo).to_string();
                match self.crosswalk.to_format(&rec.meta, rec.datestamp, prefix) {
                    Ok(meta) => write_record(w, &ident, rec.datestamp, RecordOutcome::Full(&meta)),
                    Err(_) => write_record(w, &ident, rec.datestamp, RecordOutcome::HeaderOnly),
                }
            }
        }))
    }

    /// Up to `page_size` entries, extended to the end of the last datestamp
    /// so that a date-only token never splits a day.
    fn page<'v>(&self, view: &'v StoreView<'_>, args: &'v ListArgs) -> Result<Page<'v>, Malformed> {
        let mut iter = view
            .range(args.from, args.until, args.set.as_ref())
            .map_err(|e| Malformed(e.to_string()))?
            .peekable();
        let mut entries: Vec<&IndexEntry> = iter.by_ref().take(self.config.page_size).collect();
        if let Some(last) = entries.last().map(|e| e.datestamp) {
            while let Some(e) = iter.next_if(|e| e.datestamp == last) {
                entries.push(e);
            }
        }
        Ok(Page {
            entries,
            next_from: iter.peek().map(|e| e.datestamp),
        })
    }

    fn token(args: &ListArgs, next_from: Option<Datestamp>, format: Option<FormatKind>) -> Option<ResumptionToken> {
        next_from.map(|next_from| ResumptionToken {
            next_from,
            until: args.until,
            set: args.set.clone(),
            format_tag: format.map(|f| f.tag().to_owned()),
        })
    }

    fn list_identifiers(&self, sel: ListSelection, request_url: &str, now: DateTime<Utc>) -> Result<String, Malformed> {
        let args = ListArgs::from(sel);
        let view = self.store.read();
        let page = self.page(&view, &args)?;
        let token = Self::token(&args, page.next_from, None);
        Ok(self.envelope(Verb::ListIdentifiers, request_url, now, |w| {
            for e in &page.entries {
                let el = w.create_element("identifier");
                let el = if e.deleted {
                    el.with_attribute(("status", "deleted"))
                } else {
                    el
                };
                el.write_text_content(BytesText::new(&e.identifier))?;
            }
            xml::opt_element(w, "resumptionToken", token.map(|t| t.to_string()).as_deref())
        }))
    }

    /// Checks that need the format registry, done before admission so that
    /// only valid requests count against a client. Returns the ListRecords
    /// format.
    fn list_format(&self, request: &OaiRequest) -> Result<Option<FormatKind>, Malformed> {
        let formats = self.crosswalk.formats();
        match request {
            OaiRequest::ListIdentifiers(ListSelection::Resume(t)) if t.format_tag.is_some() => {
                Err(Malformed(format!("token {t} belongs to ListRecords")))
            }
            OaiRequest::ListRecords { selection, metadata_prefix } => match (selection, metadata_prefix) {
                (ListSelection::Resume(t), _) => {
                    let tag = t.format_tag.as_deref().unwrap_or_default();
                    formats
                        .from_tag(tag)
                        .map(Some)
                        .ok_or_else(|| Malformed(format!("token format {tag:?} is not offered")))
                }
                (ListSelection::Initial { .. }, Some(p)) => formats
                    .lookup(p)
                    .map(Some)
                    .ok_or_else(|| Malformed(format!("metadataPrefix {p:?} is not offered"))),
                (ListSelection::Initial { .. }, None) => Err(Malformed("metadataPrefix missing".into())),
            },
            _ => Ok(None),
        }
    }

    fn list_records(
        &self,
        sel: ListSelection,
        format: FormatKind,
        request_url: &str,
        now: DateTime<Utc>,
    ) -> Result<String, Malformed> {
        let args = ListArgs::from(sel);
        let view = self.store.read();
        let page = self.page(&view, &args)?;
        let token = Self::token(&args, page.next_from, Some(format));
        Ok(self.envelope(Verb::ListRecords, request_url, now, |w| {
            for e in &page.entries {
                match (e.deleted, view.get(&e.id)) {
                    (false, Lookup::Found(rec)) => {
                        let meta = self.crosswalk.convert(&rec.meta, e.datestamp, format);
                        write_record(w, &e.identifier, e.datestamp, RecordOutcome::Full(&meta))?
                    }
                    _ => write_record(w, &e.identifier, e.datestamp, RecordOutcome::Deleted)?,
                }
            }
            xml::opt_element(w, "resumptionToken", token.map(|t| t.to_string()).as_deref())
        }))
    }

    fn document(&self) -> VerbResponse {
        let base = quick_xml::escape::escape(self.config.base_url.as_str()).into_owned();
        let name = quick_xml::escape::escape(self.config.repository_name.as_str()).into_owned();
        let samples = [
            "verb=Identify",
            "verb=ListSets",
            "verb=ListMetadataFormats",
            "verb=ListIdentifiers",
            "verb=ListRecords&amp;metadataPrefix=oai_dc",
        ];
        let mut links = String::new();
        for s in samples {
            links.push_str(&format!("<li><a href=\"{base}?{s}\">{base}?{s}</a></li>\n"));
        }
        let verbs: Vec<&str> = Verb::ALL.iter().filter(|v| **v != Verb::Document).map(|v| v.name()).collect();
        VerbResponse {
            status: 400,
            content_type: CONTENT_TYPE_HTML,
            body: format!(
                "<!DOCTYPE html>\n<html><head><title>{name} OAI interface</title></head><body>\n\
                 <h1>{name} OAI interface</h1>\n\
                 <p>Document is not a protocol verb. This endpoint at {base} implements OAI protocol version \
                 {version} with the verbs {verbs}. List responses are paged {page} at a time with \
                 resumption tokens; ListSets and ListMetadataFormats are never paged. Requests are subject to \
                 flow control and may be answered with 503 and a Retry-After header.</p>\n\
                 <p>Example requests:</p>\n<ul>\n{links}</ul>\n</body></html>\n",
                version = self.config.protocol_version,
                verbs = verbs.join(", "),
                page = self.config.page_size,
            ),
            retry_after: None,
        }
    }
}

struct Malformed(String);
