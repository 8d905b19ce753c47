//! Conversion of stored metadata into the disseminated formats.

mod authors;
mod formats;
mod language;
mod tables;
mod tex;

use std::sync::Arc;

use thiserror::Error;

pub use authors::{parse_authors, AuthorName};
pub use formats::{
    ArxivOldRecord, ArxivRecord, ArxivVersion, DublinCoreRecord, FormatDescriptor, FormatKind, FormatRegistry,
    MetadataRecord, Rfc1807Record,
};
pub use language::detect_language;
pub use tables::{CrosswalkTables, TableError};
pub use tex::tex_to_utf8;

use crate::datestamp::Datestamp;
use crate::store::{InternalMetadata, DATE_FORMAT};
use crate::taxonomy::{CategoryRef, TaxonomyConfig};

pub const DEFAULT_ABS_BASE: &str = "http://arXiv.org/abs/";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrosswalkError {
    #[error("unsupported metadata format {0:?}")]
    UnsupportedFormat(String),
}

#[derive(Debug, Clone)]
pub struct Crosswalk {
    tables: Arc<CrosswalkTables>,
    taxonomy: Arc<TaxonomyConfig>,
    formats: FormatRegistry,
    abs_base: String,
}

impl Crosswalk {
    pub fn new(tables: Arc<CrosswalkTables>, taxonomy: Arc<TaxonomyConfig>) -> Self {
        Self {
            tables,
            taxonomy,
            formats: FormatRegistry::default(),
            abs_base: DEFAULT_ABS_BASE.to_owned(),
        }
    }

    pub fn with_formats(mut self, formats: FormatRegistry) -> Self {
        self.formats = formats;
        self
    }

    /// Prefix of the abstract-page URL; the id is appended.
    pub fn with_abs_base(mut self, base: &str) -> Self {
        self.abs_base = base.to_owned();
        self
    }

    pub fn formats(&self) -> &FormatRegistry {
        &self.formats
    }

    pub fn tables(&self) -> &CrosswalkTables {
        &self.tables
    }

    pub fn to_format(
        &self,
        meta: &InternalMetadata,
        datestamp: Datestamp,
        prefix: &str,
    ) -> Result<MetadataRecord, CrosswalkError> {
        let kind = self
            .formats
            .lookup(prefix)
            .ok_or_else(|| CrosswalkError::UnsupportedFormat(prefix.to_owned()))?;
        Ok(self.convert(meta, datestamp, kind))
    }

    pub fn convert(&self, meta: &InternalMetadata, datestamp: Datestamp, kind: FormatKind) -> MetadataRecord {
        match kind {
            FormatKind::OaiDc => MetadataRecord::Dc(self.dublin_core(meta, datestamp)),
            FormatKind::OaiRfc1807 => MetadataRecord::Rfc1807(self.rfc1807(meta, datestamp)),
            FormatKind::ArXiv => MetadataRecord::Arxiv(self.arxiv(meta)),
            FormatKind::ArXivOld => MetadataRecord::ArxivOld(arxiv_old(meta)),
        }
    }

    fn tex(&self, s: &str) -> String {
        tex_to_utf8(s, &self.tables)
    }

    fn authors(&self, meta: &InternalMetadata) -> Vec<AuthorName> {
        parse_authors(&self.tex(&meta.authors_raw), &self.tables)
    }

    fn categories(meta: &InternalMetadata) -> Vec<CategoryRef> {
        let mut cats = vec![CategoryRef::of(&meta.id)];
        for c in &meta.crosslists {
            if !cats.contains(c) {
                cats.push(c.clone());
            }
        }
        cats
    }

    fn subject(&self, cat: &CategoryRef) -> String {
        self.taxonomy
            .display_name(cat)
            .map_or_else(|| cat.to_string(), str::to_owned)
    }

    fn abs_url(&self, meta: &InternalMetadata) -> String {
        format!("{}{}", self.abs_base, meta.id)
    }

    pub fn dublin_core(&self, meta: &InternalMetadata, datestamp: Datestamp) -> DublinCoreRecord {
        let mut descriptions = vec![self.tex(&meta.abstract_text)];
        if let Some(c) = &meta.comments {
            descriptions.push(format!("Comment: {}", self.tex(c)));
        }
        let mut subjects: Vec<String> = Vec::new();
        for cat in Self::categories(meta) {
            let s = self.subject(&cat);
            if !subjects.contains(&s) {
                subjects.push(s);
            }
        }
        DublinCoreRecord {
            title: self.tex(&meta.title),
            creators: self.authors(meta).iter().map(AuthorName::inverted).collect(),
            subjects,
            descriptions,
            date: datestamp,
            kind: "e-print".to_owned(),
            identifier: self.abs_url(meta),
        }
    }

    pub fn rfc1807(&self, meta: &InternalMetadata, datestamp: Datestamp) -> Rfc1807Record {
        let authors = self.authors(meta);
        let mut organizations: Vec<String> = Vec::new();
        for a in &authors {
            if let Some(aff) = &a.affiliation {
                if !organizations.contains(aff) {
                    organizations.push(aff.clone());
                }
            }
        }
        Rfc1807Record {
            bib_version: "v2".to_owned(),
            id: meta.id.to_string(),
            entry: Datestamp::of(meta.first_submitted()),
            organizations,
            title: self.tex(&meta.title),
            authors: authors.iter().map(AuthorName::inverted).collect(),
            date: datestamp,
            language: detect_language(meta.comments.as_deref(), &self.tables).map(str::to_owned),
            notes: meta.comments.as_deref().map(|c| self.tex(c)),
            abstract_text: self.tex(&meta.abstract_text),
            other_access: format!("url:{}", self.abs_url(meta)),
        }
    }

    pub fn arxiv(&self, meta: &InternalMetadata) -> ArxivRecord {
        ArxivRecord {
            id: meta.id.to_string(),
            versions: meta
                .submissions
                .iter()
                .map(|s| ArxivVersion {
                    version: s.version,
                    date: s.date.format(DATE_FORMAT).to_string(),
                    size: s.size.clone(),
                })
                .collect(),
            title: self.tex(&meta.title),
            authors: self.authors(meta),
            categories: Self::categories(meta).iter().map(ToString::to_string).collect(),
            comments: meta.comments.as_deref().map(|c| self.tex(c)),
            journal_ref: meta.journal_ref.as_deref().map(|c| self.tex(c)),
            report_no: meta.report_no.clone(),
            license: meta.license.clone(),
            abstract_text: self.tex(&meta.abstract_text),
        }
    }
}

fn arxiv_old(meta: &InternalMetadata) -> ArxivOldRecord {
    let subj = (!meta.crosslists.is_empty()).then(|| {
        meta.crosslists
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    });
    ArxivOldRecord {
        id: meta.id.to_string(),
        from: meta.from.clone(),
        dates: meta
            .submissions
            .iter()
            .map(|s| {
                let mut d = s.date.format(DATE_FORMAT).to_string();
                if let Some(size) = &s.size {
                    d.push_str(&format!("   ({size})"));
                }
                (s.version, d)
            })
            .collect(),
        title: meta.title.clone(),
        authors: meta.authors_raw.clone(),
        comments: meta.comments.clone(),
        journal_ref: meta.journal_ref.clone(),
        report_no: meta.report_no.clone(),
        license: meta.license.clone(),
        subj_class: subj,
        abstract_text: meta.abstract_text.clone(),
    }
}
