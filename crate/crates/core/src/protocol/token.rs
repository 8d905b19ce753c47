//! `from_until_set_format` resumption tokens.
//!
//! Empty fields stay empty, so a ListIdentifiers continuation reads
//! `1992-05-01___` and a ListRecords one `1992-05-01___dc`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::datestamp::Datestamp;
use crate::taxonomy::SetSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad resumptionToken {token:?}: {reason}")]
pub struct TokenError {
    pub token: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResumptionToken {
    pub next_from: Datestamp,
    pub until: Option<Datestamp>,
    pub set: Option<SetSpec>,
    /// Format prefix without `oai_`.
    pub format_tag: Option<String>,
}

impl fmt::Display for ResumptionToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_", self.next_from)?;
        if let Some(u) = self.until {
            write!(f, "{u}")?;
        }
        f.write_str("_")?;
        if let Some(s) = &self.set {
            write!(f, "{s}")?;
        }
        f.write_str("_")?;
        if let Some(t) = &self.format_tag {
            f.write_str(t)?;
        }
        Ok(())
    }
}

impl FromStr for ResumptionToken {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, TokenError> {
        let fail = |reason: String| TokenError {
            token: s.to_owned(),
            reason,
        };
        let parts: Vec<&str> = s.splitn(4, '_').collect();
        let [from, until, set, tag] = parts[..] else {
            return Err(fail("expected four `_`-separated fields".into()));
        };
        let next_from: Datestamp = from.parse().map_err(|e| fail(format!("{e}")))?;
        let until = match until {
            "" => None,
            u => Some(u.parse::<Datestamp>().map_err(|e| fail(format!("{e}")))?),
        };
        if until.is_some_and(|u| next_from > u) {
            return Err(fail("from is after until".into()));
        }
        let set = match set {
            "" => None,
            s => Some(s.parse::<SetSpec>().map_err(|e| fail(e.to_string()))?),
        };
        if tag.chars().any(|c| c.is_whitespace()) {
            return Err(fail("format tag contains whitespace".into()));
        }
        Ok(Self {
            next_from,
            until,
            set,
            format_tag: (!tag.is_empty()).then(|| tag.to_owned()),
        })
    }
}
