//! Dissemination formats and their XML renderings.

use std::io;

use quick_xml::events::BytesText;

use super::authors::AuthorName;
use crate::datestamp::Datestamp;
use crate::xml::{opt_element, text_element, XmlWriter, XSI_NS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormatKind {
    ArXivOld,
    ArXiv,
    OaiRfc1807,
    OaiDc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatDescriptor {
    pub kind: FormatKind,
    pub prefix: &'static str,
    pub schema: &'static str,
    pub namespace: &'static str,
}

const RFC1807_NS: &str = "http://info.internet.isi.edu:80/in-notes/rfc/files/rfc1807.txt";
const DC_NS: &str = "http://purl.org/dc/elements/1.1/";
const ARXIV_NS: &str = "http://arXiv.org/OAI/";

impl FormatKind {
    pub const ALL: [FormatKind; 4] = [Self::ArXivOld, Self::ArXiv, Self::OaiRfc1807, Self::OaiDc];

    pub fn descriptor(self) -> FormatDescriptor {
        let (prefix, schema, namespace) = match self {
            Self::ArXivOld => ("arXivOld", "http://arXiv.org/OAI/arXivOld.xsd", ARXIV_NS),
            Self::ArXiv => ("arXiv", "http://arXiv.org/OAI/arXiv.xsd", ARXIV_NS),
            Self::OaiRfc1807 => ("oai_rfc1807", "http://www.openarchives.org/OAI/rfc1807.xsd", RFC1807_NS),
            Self::OaiDc => ("oai_dc", "http://www.openarchives.org/OAI/dc.xsd", DC_NS),
        };
        FormatDescriptor {
            kind: self,
            prefix,
            schema,
            namespace,
        }
    }

    pub fn prefix(self) -> &'static str {
        self.descriptor().prefix
    }

    /// Short form carried in resumption tokens: the prefix without `oai_`.
    pub fn tag(self) -> &'static str {
        let p = self.prefix();
        p.strip_prefix("oai_").unwrap_or(p)
    }
}

/// The formats a provider offers, in listing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatRegistry {
    formats: Vec<FormatKind>,
}

impl Default for FormatRegistry {
    fn default() -> Self {
        Self {
            formats: FormatKind::ALL.to_vec(),
        }
    }
}

impl FormatRegistry {
    /// Duplicates are dropped, keeping first position.
    pub fn new(formats: impl IntoIterator<Item = FormatKind>) -> Self {
        let mut out = Vec::new();
        for f in formats {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        Self { formats: out }
    }

    pub fn iter(&self) -> impl Iterator<Item = FormatDescriptor> + '_ {
        self.formats.iter().map(|f| f.descriptor())
    }

    pub fn lookup(&self, prefix: &str) -> Option<FormatKind> {
        self.formats.iter().copied().find(|f| f.prefix() == prefix)
    }

    pub fn from_tag(&self, tag: &str) -> Option<FormatKind> {
        self.formats.iter().copied().find(|f| f.tag() == tag)
    }
}

fn schema_location(desc: &FormatDescriptor) -> String {
    format!("{} {}", desc.namespace, desc.schema)
}

fn open_root<'w>(
    w: &'w mut XmlWriter,
    root: &'w str,
    kind: FormatKind,
) -> quick_xml::writer::ElementWriter<'w, Vec<u8>> {
    let desc = kind.descriptor();
    let loc = schema_location(&desc);
    w.create_element(root)
        .with_attribute(("xmlns", desc.namespace))
        .with_attribute(("xmlns:xsi", XSI_NS))
        .with_attribute(("xsi:schemaLocation", loc.as_str()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DublinCoreRecord {
    pub title: String,
    pub creators: Vec<String>,
    pub subjects: Vec<String>,
    pub descriptions: Vec<String>,
    pub date: Datestamp,
    pub kind: String,
    pub identifier: String,
}

impl DublinCoreRecord {
    pub fn write_xml(&self, w: &mut XmlWriter) -> io::Result<()> {
        open_root(w, "oai_dc", FormatKind::OaiDc).write_inner_content(|w| {
            text_element(w, "title", &self.title)?;
            for c in &self.creators {
                text_element(w, "creator", c)?;
            }
            for s in &self.subjects {
                text_element(w, "subject", s)?;
            }
            for d in &self.descriptions {
                text_element(w, "description", d)?;
            }
            text_element(w, "date", &self.date.to_string())?;
            text_element(w, "type", &self.kind)?;
            text_element(w, "identifier", &self.identifier)
        })?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rfc1807Record {
    pub bib_version: String,
    pub id: String,
    pub entry: Datestamp,
    pub organizations: Vec<String>,
    pub title: String,
    pub authors: Vec<String>,
    pub date: Datestamp,
    pub language: Option<String>,
    pub notes: Option<String>,
    pub abstract_text: String,
    pub other_access: String,
}

impl Rfc1807Record {
    pub fn write_xml(&self, w: &mut XmlWriter) -> io::Result<()> {
        open_root(w, "rfc1807", FormatKind::OaiRfc1807).write_inner_content(|w| {
            text_element(w, "bib-version", &self.bib_version)?;
            text_element(w, "id", &self.id)?;
            text_element(w, "entry", &self.entry.to_string())?;
            for o in &self.organizations {
                text_element(w, "organization", o)?;
            }
            text_element(w, "title", &self.title)?;
            for a in &self.authors {
                text_element(w, "author", a)?;
            }
            text_element(w, "date", &self.date.to_string())?;
            opt_element(w, "language", self.language.as_deref())?;
            opt_element(w, "notes", self.notes.as_deref())?;
            text_element(w, "abstract", &self.abstract_text)?;
            text_element(w, "other_access", &self.other_access)
        })?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArxivVersion {
    pub version: u32,
    pub date: String,
    pub size: Option<String>,
}

/// Structured rendering: one element per field, authors split, TeX converted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArxivRecord {
    pub id: String,
    pub versions: Vec<ArxivVersion>,
    pub title: String,
    pub authors: Vec<AuthorName>,
    pub categories: Vec<String>,
    pub comments: Option<String>,
    pub journal_ref: Option<String>,
    pub report_no: Option<String>,
    pub license: Option<String>,
    pub abstract_text: String,
}

impl ArxivRecord {
    pub fn write_xml(&self, w: &mut XmlWriter) -> io::Result<()> {
        open_root(w, "arXiv", FormatKind::ArXiv).write_inner_content(|w| {
            text_element(w, "id", &self.id)?;
            for v in &self.versions {
                let n = v.version.to_string();
                w.create_element("version")
                    .with_attribute(("version", n.as_str()))
                    .write_inner_content(|w| {
                        text_element(w, "date", &v.date)?;
                        opt_element(w, "size", v.size.as_deref())
                    })?;
            }
            text_element(w, "title", &self.title)?;
            w.create_element("authors").write_inner_content(|w| {
                for a in &self.authors {
                    w.create_element("author").write_inner_content(|w| {
                        text_element(w, "keyname", &a.keyname)?;
                        opt_element(w, "forenames", a.forenames.as_deref())?;
                        opt_element(w, "prefix", a.prefix.as_deref())?;
                        opt_element(w, "suffix", a.suffix.as_deref())?;
                        opt_element(w, "affiliation", a.affiliation.as_deref())
                    })?;
                }
                Ok(())
            })?;
            text_element(w, "categories", &self.categories.join(" "))?;
            opt_element(w, "comments", self.comments.as_deref())?;
            opt_element(w, "journal-ref", self.journal_ref.as_deref())?;
            opt_element(w, "report-no", self.report_no.as_deref())?;
            opt_element(w, "license", self.license.as_deref())?;
            text_element(w, "abstract", &self.abstract_text)
        })?;
        Ok(())
    }
}

/// Verbatim rendering of the stored fields, TeX left as submitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArxivOldRecord {
    pub id: String,
    pub from: Option<String>,
    /// `(version, date line as stored)`
    pub dates: Vec<(u32, String)>,
    pub title: String,
    pub authors: String,
    pub comments: Option<String>,
    pub journal_ref: Option<String>,
    pub report_no: Option<String>,
    pub license: Option<String>,
    pub subj_class: Option<String>,
    pub abstract_text: String,
}

impl ArxivOldRecord {
    pub fn write_xml(&self, w: &mut XmlWriter) -> io::Result<()> {
        open_root(w, "arXivOld", FormatKind::ArXivOld).write_inner_content(|w| {
            text_element(w, "id", &self.id)?;
            opt_element(w, "from", self.from.as_deref())?;
            for (v, d) in &self.dates {
                let n = v.to_string();
                w.create_element("date")
                    .with_attribute(("version", n.as_str()))
                    .write_text_content(BytesText::new(d))?;
            }
            text_element(w, "title", &self.title)?;
            text_element(w, "authors", &self.authors)?;
            opt_element(w, "comments", self.comments.as_deref())?;
            opt_element(w, "journal-ref", self.journal_ref.as_deref())?;
            opt_element(w, "report-no", self.report_no.as_deref())?;
            opt_element(w, "license", self.license.as_deref())?;
            opt_element(w, "subj-class", self.subj_class.as_deref())?;
            text_element(w, "abstract", &self.abstract_text)
        })?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetadataRecord {
    Dc(DublinCoreRecord),
    Rfc1807(Rfc1807Record),
    Arxiv(ArxivRecord),
    ArxivOld(ArxivOldRecord),
}

impl MetadataRecord {
    pub fn kind(&self) -> FormatKind {
        match self {
            Self::Dc(_) => FormatKind::OaiDc,
            Self::Rfc1807(_) => FormatKind::OaiRfc1807,
            Self::Arxiv(_) => FormatKind::ArXiv,
            Self::ArxivOld(_) => FormatKind::ArXivOld,
        }
    }

    pub fn write_xml(&self, w: &mut XmlWriter) -> io::Result<()> {
        match self {
            Self::Dc(r) => r.write_xml(w),
            Self::Rfc1807(r) => r.write_xml(w),
            Self::Arxiv(r) => r.write_xml(w),
            Self::ArxivOld(r) => r.write_xml(w),
        }
    }

    pub fn to_xml_fragment(&self) -> String {
        let mut w = crate::xml::fragment();
        self.write_xml(&mut w).expect("writing to a Vec cannot fail");
        crate::xml::finish(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_order_and_tags() {
        let r = FormatRegistry::default();
        let prefixes: Vec<_> = r.iter().map(|d| d.prefix).collect();
        assert_eq!(prefixes, ["arXivOld", "arXiv", "oai_rfc1807", "oai_dc"]);
        assert_eq!(FormatKind::OaiDc.tag(), "dc");
        assert_eq!(FormatKind::ArXivOld.tag(), "arXivOld");
        assert_eq!(r.from_tag("rfc1807"), Some(FormatKind::OaiRfc1807));
        assert_eq!(r.lookup("unknown"), None);
        for d in r.iter() {
            assert!(!d.kind.tag().contains('_'));
        }
        let narrow = FormatRegistry::new([FormatKind::OaiDc, FormatKind::OaiDc]);
        assert_eq!(narrow.iter().count(), 1);
        assert_eq!(narrow.lookup("arXiv"), None);
    }
}
