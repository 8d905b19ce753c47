//! Verb and argument grammar.

use std::collections::BTreeMap;

use thiserror::Error;

use super::token::ResumptionToken;
use crate::datestamp::Datestamp;
use crate::flowcontrol::VerbClass;
use crate::taxonomy::SetSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequestError {
    #[error("missing verb argument")]
    MissingVerb,
    #[error("unknown verb {0:?}")]
    UnknownVerb(String),
    #[error("argument {0:?} repeated")]
    Repeated(String),
    #[error("argument {arg:?} is not allowed for {verb}")]
    Illegal { verb: &'static str, arg: String },
    #[error("{verb} requires {arg}")]
    Missing { verb: &'static str, arg: &'static str },
    #[error("resumptionToken must be the only argument besides verb")]
    TokenNotExclusive,
    #[error("bad {arg} value {value:?}")]
    BadValue { arg: &'static str, value: String },
    #[error("from {from} is after until {until}")]
    BadRange { from: Datestamp, until: Datestamp },
    #[error(transparent)]
    Token(#[from] super::token::TokenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verb {
    Identify,
    ListSets,
    ListMetadataFormats,
    GetRecord,
    ListIdentifiers,
    ListRecords,
    Document,
}

impl Verb {
    pub const ALL: [Verb; 7] = [
        Self::Identify,
        Self::ListSets,
        Self::ListMetadataFormats,
        Self::GetRecord,
        Self::ListIdentifiers,
        Self::ListRecords,
        Self::Document,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Identify => "Identify",
            Self::ListSets => "ListSets",
            Self::ListMetadataFormats => "ListMetadataFormats",
            Self::GetRecord => "GetRecord",
            Self::ListIdentifiers => "ListIdentifiers",
            Self::ListRecords => "ListRecords",
            Self::Document => "Document",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn class(self) -> VerbClass {
        match self {
            Self::ListIdentifiers | Self::ListRecords => VerbClass::List,
            _ => VerbClass::Other,
        }
    }

    fn legal_args(self) -> &'static [&'static str] {
        match self {
            Self::Identify | Self::ListSets | Self::Document => &[],
            Self::ListMetadataFormats => &["identifier"],
            Self::GetRecord => &["identifier", "metadataPrefix"],
            Self::ListIdentifiers => &["from", "until", "set", "resumptionToken"],
            Self::ListRecords => &["from", "until", "set", "metadataPrefix", "resumptionToken"],
        }
    }
}

/// Selection for the two list verbs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ListSelection {
    Initial {
        from: Option<Datestamp>,
        until: Option<Datestamp>,
        set: Option<SetSpec>,
    },
    Resume(ResumptionToken),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OaiRequest {
    Identify,
    ListSets,
    ListMetadataFormats { identifier: Option<String> },
    GetRecord { identifier: String, metadata_prefix: String },
    ListIdentifiers(ListSelection),
    ListRecords { selection: ListSelection, metadata_prefix: Option<String> },
    Document,
}

impl OaiRequest {
    pub fn verb(&self) -> Verb {
        match self {
            Self::Identify => Verb::Identify,
            Self::ListSets => Verb::ListSets,
            Self::ListMetadataFormats { .. } => Verb::ListMetadataFormats,
            Self::GetRecord { .. } => Verb::GetRecord,
            Self::ListIdentifiers(_) => Verb::ListIdentifiers,
            Self::ListRecords { .. } => Verb::ListRecords,
            Self::Document => Verb::Document,
        }
    }
}

fn date_arg(args: &BTreeMap<&str, &str>, arg: &'static str) -> Result<Option<Datestamp>, RequestError> {
    args.get(arg)
        .map(|v| {
            v.parse::<Datestamp>().map_err(|_| RequestError::BadValue {
                arg,
                value: (*v).to_owned(),
            })
        })
        .transpose()
}

fn selection(args: &BTreeMap<&str, &str>) -> Result<ListSelection, RequestError> {
    if let Some(tok) = args.get("resumptionToken") {
        if args.len() > 1 {
            return Err(RequestError::TokenNotExclusive);
        }
        return Ok(ListSelection::Resume(tok.parse()?));
    }
    let from = date_arg(args, "from")?;
    let until = date_arg(args, "until")?;
    if let (Some(from), Some(until)) = (from, until) {
        if from > until {
            return Err(RequestError::BadRange { from, until });
        }
    }
    let set = args
        .get("set")
        .map(|s| {
            s.parse::<SetSpec>().map_err(|_| RequestError::BadValue {
                arg: "set",
                value: (*s).to_owned(),
            })
        })
        .transpose()?;
    Ok(ListSelection::Initial { from, until, set })
}

fn non_empty(args: &BTreeMap<&str, &str>, arg: &'static str) -> Result<Option<String>, RequestError> {
    match args.get(arg) {
        None => Ok(None),
        Some(v) if v.trim().is_empty() => Err(RequestError::BadValue {
            arg,
            value: (*v).to_owned(),
        }),
        Some(v) => Ok(Some((*v).to_owned())),
    }
}

/// Validate decoded keyword arguments, in the order received.
pub fn parse_request(pairs: &[(String, String)]) -> Result<OaiRequest, RequestError> {
    let mut verb = None;
    let mut args: BTreeMap<&str, &str> = BTreeMap::new();
    for (k, v) in pairs {
        if k == "verb" {
            if verb.replace(v.as_str()).is_some() {
                return Err(RequestError::Repeated("verb".into()));
            }
        } else if args.insert(k.as_str(), v.as_str()).is_some() {
            return Err(RequestError::Repeated(k.clone()));
        }
    }
    let name = verb.ok_or(RequestError::MissingVerb)?;
    let verb = Verb::parse(name).ok_or_else(|| RequestError::UnknownVerb(name.to_owned()))?;
    if let Some(bad) = args.keys().find(|k| !verb.legal_args().contains(k)) {
        return Err(RequestError::Illegal {
            verb: verb.name(),
            arg: (*bad).to_owned(),
        });
    }
    let required = |arg: &'static str| -> Result<String, RequestError> {
        non_empty(&args, arg)?.ok_or(RequestError::Missing { verb: verb.name(), arg })
    };
    Ok(match verb {
        Verb::Identify => OaiRequest::Identify,
        Verb::ListSets => OaiRequest::ListSets,
        Verb::Document => OaiRequest::Document,
        Verb::ListMetadataFormats => OaiRequest::ListMetadataFormats {
            identifier: non_empty(&args, "identifier")?,
        },
        Verb::GetRecord => OaiRequest::GetRecord {
            identifier: required("identifier")?,
            metadata_prefix: required("metadataPrefix")?,
        },
        Verb::ListIdentifiers => OaiRequest::ListIdentifiers(selection(&args)?),
        Verb::ListRecords => {
            let selection = selection(&args)?;
            let metadata_prefix = match &selection {
                ListSelection::Resume(t) if t.format_tag.is_none() => {
                    return Err(RequestError::BadValue {
                        arg: "resumptionToken",
                        value: t.to_string(),
                    })
                }
                ListSelection::Resume(_) => None,
                ListSelection::Initial { .. } => Some(required("metadataPrefix")?),
            };
            OaiRequest::ListRecords {
                selection,
                metadata_prefix,
            }
        }
    })
}
