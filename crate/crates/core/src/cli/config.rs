//! Operator settings: an optional TOML file, then command-line flags.

use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

/// Every key is optional; a flag given on the command line wins.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub data_dir: Option<PathBuf>,
    pub port: Option<u16>,
    pub bind: Option<IpAddr>,
    pub base_url: Option<String>,
    pub page_size: Option<usize>,
    /// Seconds.
    pub min_interval_list: Option<f64>,
    /// Seconds.
    pub min_interval_other: Option<f64>,
    /// Seconds.
    pub rebuild_interval: Option<f64>,
    pub taxonomy: Option<PathBuf>,
    pub repository: Option<PathBuf>,
    pub tables: Option<PathBuf>,
    pub state_file: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("{setting} must be {expected}, got {got}")]
    Invalid {
        setting: &'static str,
        expected: &'static str,
        got: String,
    },
}

impl CliConfig {
    /// Relative paths in the file are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self, CliConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut c: Self = toml::from_str(&text).map_err(|e| CliConfigError::Syntax {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut c.data_dir,
            &mut c.taxonomy,
            &mut c.repository,
            &mut c.tables,
            &mut c.state_file,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(c)
    }
}

/// A non-negative, finite number of seconds.
pub fn seconds(setting: &'static str, value: f64) -> Result<Duration, CliConfigError> {
    Duration::try_from_secs_f64(value).map_err(|_| CliConfigError::Invalid {
        setting,
        expected: "a non-negative number of seconds",
        got: value.to_string(),
    })
}
