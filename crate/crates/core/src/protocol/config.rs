//! Repository identity as reported by Identify, plus paging size.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PROTOCOL_VERSION: &str = "1.0";
pub const DEFAULT_PAGE_SIZE: usize = 500;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("repository config: {0}")]
    Invalid(String),
    #[error("repository config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifierDescription {
    pub scheme: String,
    pub repository_identifier: String,
    pub delimiter: String,
    pub sample_identifier: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Policy {
    pub text: Option<String>,
    pub url: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprintsDescription {
    pub content: Option<Policy>,
    pub metadata_policy: Option<Policy>,
    pub data_policy: Option<Policy>,
    pub submission_policy: Option<Policy>,
}

impl EprintsDescription {
    fn is_empty(&self) -> bool {
        [&self.content, &self.metadata_policy, &self.data_policy, &self.submission_policy]
            .iter()
            .all(|p| p.is_none())
    }
}

fn default_page_size() -> usize {
    DEFAULT_PAGE_SIZE
}

fn default_protocol_version() -> String {
    PROTOCOL_VERSION.to_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepositoryConfig {
    pub repository_name: String,
    pub base_url: String,
    pub admin_email: String,
    #[serde(default = "default_protocol_version")]
    pub protocol_version: String,
    pub identifier: IdentifierDescription,
    #[serde(default)]
    pub eprints: Option<EprintsDescription>,
    #[serde(default = "default_page_size")]
    pub page_size: usize,
}

const DEMO: &str = include_str!("../../data/repository.toml");

impl RepositoryConfig {
    pub fn demo() -> Self {
        Self::from_toml(DEMO).expect("bundled repository config")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let required = [
            ("repository_name", &self.repository_name),
            ("base_url", &self.base_url),
            ("admin_email", &self.admin_email),
            ("identifier.scheme", &self.identifier.scheme),
            ("identifier.repository_identifier", &self.identifier.repository_identifier),
            ("identifier.delimiter", &self.identifier.delimiter),
            ("identifier.sample_identifier", &self.identifier.sample_identifier),
        ];
        for (name, value) in required {
            if value.trim().is_empty() {
                return Err(ConfigError::Invalid(format!("{name} must not be empty")));
            }
        }
        if self.protocol_version != PROTOCOL_VERSION {
            return Err(ConfigError::Invalid(format!(
                "protocol_version must be {PROTOCOL_VERSION}, got {:?}",
                self.protocol_version
            )));
        }
        if self.page_size == 0 {
            return Err(ConfigError::Invalid("page_size must be positive".into()));
        }
        url::Url::parse(&self.base_url)
            .map_err(|e| ConfigError::Invalid(format!("base_url {:?}: {e}", self.base_url)))?;
        Ok(())
    }

    /// The eprints description, or `None` when it has no content.
    pub fn eprints(&self) -> Option<&EprintsDescription> {
        self.eprints.as_ref().filter(|e| !e.is_empty())
    }

    /// Path component of the base URL, e.g. `/oai1`.
    pub fn base_path(&self) -> String {
        url::Url::parse(&self.base_url)
            .map(|u| u.path().to_owned())
            .unwrap_or_else(|_| "/oai1".to_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_values() {
        let c = RepositoryConfig::demo();
        assert_eq!(c.repository_name, "arXiv");
        assert_eq!(c.base_url, "http://arXiv.org/oai1");
        assert_eq!(c.identifier.sample_identifier, "oai:arXiv:quant-ph/9901001");
        assert_eq!(c.base_path(), "/oai1");
        assert!(c.eprints().is_some());
    }

    #[test]
    fn validation() {
        let mut c = RepositoryConfig::demo();
        c.page_size = 0;
        assert!(c.validate().is_err());
        let mut c = RepositoryConfig::demo();
        c.admin_email = " ".into();
        assert!(c.validate().is_err());
        let mut c = RepositoryConfig::demo();
        c.protocol_version = "2.0".into();
        assert!(c.validate().is_err());
        let text = toml::to_string(&RepositoryConfig::demo()).unwrap();
        assert_eq!(RepositoryConfig::from_toml(&text).unwrap(), RepositoryConfig::demo());
        assert!(RepositoryConfig::from_toml("repository_name = 1").is_err());
    }
}
