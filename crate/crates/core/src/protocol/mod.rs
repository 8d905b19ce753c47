//! The data-provider side: request grammar, verb handlers, XML responses.

mod config;
mod provider;
mod request;
mod token;

use std::time::Duration;

pub use config::{
    ConfigError, EprintsDescription, IdentifierDescription, Policy, RepositoryConfig, DEFAULT_PAGE_SIZE,
    PROTOCOL_VERSION,
};
pub use provider::Provider;
pub use request::{parse_request, ListSelection, OaiRequest, RequestError, Verb};
pub use token::{ResumptionToken, TokenError};

pub const OAI_NS_BASE: &str = "http://www.openarchives.org/OAI/1.0/OAI_";
pub const CONTENT_TYPE_XML: &str = "text/xml; charset=utf-8";
pub const CONTENT_TYPE_HTML: &str = "text/html; charset=utf-8";
pub const CONTENT_TYPE_TEXT: &str = "text/plain; charset=utf-8";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
    /// Exact remaining wait on a 503.
    pub retry_after: Option<Duration>,
}

impl VerbResponse {
    pub fn xml(body: String) -> Self {
        Self {
            status: 200,
            content_type: CONTENT_TYPE_XML,
            body,
            retry_after: None,
        }
    }

    pub fn malformed(message: &str) -> Self {
        Self {
            status: 400,
            content_type: CONTENT_TYPE_TEXT,
            body: format!("400 Malformed request: {message}\n"),
            retry_after: None,
        }
    }

    pub fn retry_after(wait: Duration) -> Self {
        Self {
            status: 503,
            content_type: CONTENT_TYPE_TEXT,
            body: format!(
                "503 Service unavailable: retry after {} seconds\n",
                crate::flowcontrol::retry_after_header(wait)
            ),
            retry_after: Some(wait),
        }
    }
}

/// Namespace of a verb's response document.
pub fn verb_namespace(verb: Verb) -> String {
    format!("{OAI_NS_BASE}{}", verb.name())
}
