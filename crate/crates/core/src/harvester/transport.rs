//! How the harvester reaches a provider.

use std::time::Duration;

use thiserror::Error;

use crate::protocol::Provider;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportResponse {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("request to {url} failed: {message}")]
pub struct TransportError {
    pub url: String,
    pub message: String,
}

pub trait Transport: Send + Sync {
    fn get(&self, base_url: &str, args: &[(String, String)]) -> Result<TransportResponse, TransportError>;
}

/// Blocking HTTP GET.
#[derive(Debug, Clone)]
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(60))
    }
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .user_agent(concat!("eprint-oai-harvester/", env!("CARGO_PKG_VERSION")))
            .build();
        Self { agent: config.into() }
    }
}

impl Transport for HttpTransport {
    fn get(&self, base_url: &str, args: &[(String, String)]) -> Result<TransportResponse, TransportError> {
        let fail = |e: ureq::Error| TransportError {
            url: base_url.to_owned(),
            message: e.to_string(),
        };
        let mut resp = self
            .agent
            .get(base_url)
            .query_pairs(args.iter().map(|(k, v)| (k.as_str(), v.as_str())))
            .call()
            .map_err(fail)?;
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(fail)?;
        Ok(TransportResponse {
            status,
            body,
            retry_after,
        })
    }
}

/// Calls a provider in the same process. The retry delay is passed through
/// exactly rather than rounded to whole seconds.
#[derive(Debug, Clone)]
pub struct LoopbackTransport {
    provider: Provider,
    client: String,
}

impl LoopbackTransport {
    pub fn new(provider: Provider, client: &str) -> Self {
        Self {
            provider,
            client: client.to_owned(),
        }
    }

    pub fn provider(&self) -> &Provider {
        &self.provider
    }
}

impl Transport for LoopbackTransport {
    fn get(&self, _base_url: &str, args: &[(String, String)]) -> Result<TransportResponse, TransportError> {
        let r = self.provider.handle(&self.client, args);
        Ok(TransportResponse {
            status: r.status,
            body: r.body,
            retry_after: r.retry_after,
        })
    }
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, wait: Duration);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, wait: Duration) {
        std::thread::sleep(wait);
    }
}

/// Advances a manual clock instead of blocking.
#[derive(Debug, Clone)]
pub struct ClockSleeper(pub std::sync::Arc<crate::clock::ManualClock>);

impl Sleeper for ClockSleeper {
    fn sleep(&self, wait: Duration) {
        self.0.advance(wait);
    }
}
