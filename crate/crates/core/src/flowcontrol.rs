//! Per-client minimum request intervals.
//!
//! Only fulfilled requests are recorded, so a client that waits the returned
//! delay is always admitted on its next attempt.

use std::net::IpAddr;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use dashmap::mapref::entry::Entry;
use dashmap::DashMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbClass {
    /// ListIdentifiers and ListRecords.
    List,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("list interval {list:?} must be at least the other-verb interval {other:?}")]
pub struct PolicyError {
    pub list: Duration,
    pub other: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowPolicy {
    min_interval_list: Duration,
    min_interval_other: Duration,
}

impl Default for FlowPolicy {
    fn default() -> Self {
        Self {
            min_interval_list: Duration::from_secs(10),
            min_interval_other: Duration::from_secs(1),
        }
    }
}

impl FlowPolicy {
    pub fn new(min_interval_list: Duration, min_interval_other: Duration) -> Result<Self, PolicyError> {
        if min_interval_list < min_interval_other {
            return Err(PolicyError {
                list: min_interval_list,
                other: min_interval_other,
            });
        }
        Ok(Self {
            min_interval_list,
            min_interval_other,
        })
    }

    pub fn interval(&self, class: VerbClass) -> Duration {
        match class {
            VerbClass::List => self.min_interval_list,
            VerbClass::Other => self.min_interval_other,
        }
    }

    pub fn min_interval_list(&self) -> Duration {
        self.min_interval_list
    }

    pub fn min_interval_other(&self) -> Duration {
        self.min_interval_other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Allow,
    /// Remaining wait before the request would be allowed.
    RetryAfter(Duration),
}

/// Time of the last fulfilled request per client key.
#[derive(Debug, Default)]
pub struct ClientLedger {
    last: DashMap<String, DateTime<Utc>>,
}

fn elapsed(since: DateTime<Utc>, now: DateTime<Utc>) -> Duration {
    (now - since).to_std().unwrap_or(Duration::ZERO)
}

impl ClientLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Atomic check-and-update for one client.
    pub fn admit(&self, client: &str, class: VerbClass, now: DateTime<Utc>, policy: &FlowPolicy) -> Admission {
        let interval = policy.interval(class);
        match self.last.entry(client.to_owned()) {
            Entry::Vacant(v) => {
                v.insert(now);
                Admission::Allow
            }
            Entry::Occupied(mut o) => {
                let waited = elapsed(*o.get(), now);
                if waited >= interval {
                    o.insert(now);
                    Admission::Allow
                } else {
                    Admission::RetryAfter(interval - waited)
                }
            }
        }
    }

    pub fn last_request(&self, client: &str) -> Option<DateTime<Utc>> {
        self.last.get(client).map(|e| *e.value())
    }

    /// Drop clients idle for at least `horizon`. Returns how many were removed.
    pub fn evict_idle(&self, now: DateTime<Utc>, horizon: Duration) -> usize {
        let before = self.last.len();
        self.last.retain(|_, last| elapsed(*last, now) < horizon);
        before - self.last.len()
    }

    pub fn len(&self) -> usize {
        self.last.len()
    }

    pub fn is_empty(&self) -> bool {
        self.last.is_empty()
    }
}

pub type KeyFn = Arc<dyn Fn(IpAddr) -> String + Send + Sync>;

/// Policy, ledger and the mapping from network address to client key.
#[derive(Clone)]
pub struct FlowControl {
    policy: FlowPolicy,
    ledger: Arc<ClientLedger>,
    key: KeyFn,
}

impl std::fmt::Debug for FlowControl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FlowControl")
            .field("policy", &self.policy)
            .field("clients", &self.ledger.len())
            .finish()
    }
}

impl FlowControl {
    /// Clients are keyed by their full address.
    pub fn new(policy: FlowPolicy) -> Self {
        Self {
            policy,
            ledger: Arc::default(),
            key: Arc::new(|ip| ip.to_string()),
        }
    }

    pub fn with_key_fn(mut self, key: KeyFn) -> Self {
        self.key = key;
        self
    }

    pub fn policy(&self) -> &FlowPolicy {
        &self.policy
    }

    pub fn ledger(&self) -> &ClientLedger {
        &self.ledger
    }

    pub fn key(&self, addr: IpAddr) -> String {
        (self.key)(addr)
    }

    pub fn admit(&self, client: &str, class: VerbClass, now: DateTime<Utc>) -> Admission {
        self.ledger.admit(client, class, now, &self.policy)
    }

    /// Evicting after the longest interval never changes an admission result.
    pub fn evict_idle(&self, now: DateTime<Utc>) -> usize {
        self.ledger.evict_idle(now, self.policy.min_interval_list.max(Duration::from_secs(1)))
    }
}

/// Whole seconds for a `Retry-After` header, rounded up so a client never
/// retries early.
pub fn retry_after_header(wait: Duration) -> u64 {
    let secs = wait.as_secs();
    if wait.subsec_nanos() > 0 {
        secs + 1
    } else {
        secs.max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn t(ms: i64) -> DateTime<Utc> {
        Utc.timestamp_millis_opt(1_000_000_000_000 + ms).unwrap()
    }

    #[test]
    fn remaining_wait() {
        let ledger = ClientLedger::new();
        let p = FlowPolicy::default();
        assert_eq!(ledger.admit("a", VerbClass::List, t(0), &p), Admission::Allow);
        assert_eq!(
            ledger.admit("a", VerbClass::List, t(4000), &p),
            Admission::RetryAfter(Duration::from_secs(6))
        );
        assert_eq!(ledger.last_request("a"), Some(t(0)));
        assert_eq!(ledger.admit("a", VerbClass::Other, t(4000), &p), Admission::Allow);
        assert_eq!(ledger.admit("a", VerbClass::List, t(14000), &p), Admission::Allow);
        assert_eq!(ledger.admit("b", VerbClass::List, t(14000), &p), Admission::Allow);
    }

    #[test]
    fn policy_ordering_and_header() {
        assert!(FlowPolicy::new(Duration::from_secs(1), Duration::from_secs(2)).is_err());
        assert_eq!(retry_after_header(Duration::from_millis(50)), 1);
        assert_eq!(retry_after_header(Duration::from_millis(6000)), 6);
        assert_eq!(retry_after_header(Duration::from_millis(6001)), 7);
        assert_eq!(retry_after_header(Duration::ZERO), 1);
    }

    #[test]
    fn eviction() {
        let fc = FlowControl::new(FlowPolicy::default());
        fc.admit("a", VerbClass::Other, t(0));
        fc.admit("b", VerbClass::Other, t(9000));
        assert_eq!(fc.evict_idle(t(10_000)), 1);
        assert_eq!(fc.ledger().len(), 1);
        let subnet = fc.with_key_fn(Arc::new(|ip| match ip {
            IpAddr::V4(v4) => format!("{}.{}.{}", v4.octets()[0], v4.octets()[1], v4.octets()[2]),
            IpAddr::V6(v6) => v6.to_string(),
        }));
        assert_eq!(subnet.key("10.1.2.3".parse().unwrap()), "10.1.2");
    }

    #[test]
    fn concurrent_admits_allow_exactly_once() {
        let ledger = Arc::new(ClientLedger::new());
        let p = FlowPolicy::default();
        let allowed: usize = std::thread::scope(|s| {
            let handles: Vec<_> = (0..16)
                .map(|_| {
                    let ledger = &ledger;
                    s.spawn(move || ledger.admit("x", VerbClass::List, t(0), &p) == Admission::Allow)
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap() as usize).sum()
        });
        assert_eq!(allowed, 1);
    }

    proptest! {
        #[test]
        fn compliant_client_is_always_admitted(gaps in proptest::collection::vec((0i64..20_000, any::<bool>()), 1..40)) {
            let ledger = ClientLedger::new();
            let p = FlowPolicy::default();
            let mut now = 0;
            for (gap, list) in gaps {
                now += gap;
                let class = if list { VerbClass::List } else { VerbClass::Other };
                match ledger.admit("c", class, t(now), &p) {
                    Admission::Allow => {}
                    Admission::RetryAfter(d) => {
                        let again = ledger.admit("c", class, t(now), &p);
                        prop_assert_eq!(again, Admission::RetryAfter(d));
                        now += d.as_millis() as i64;
                        prop_assert_eq!(ledger.admit("c", class, t(now), &p), Admission::Allow);
                    }
                }
            }
        }

        #[test]
        fn clients_are_independent(noise in proptest::collection::vec(0i64..5_000, 0..20)) {
            let p = FlowPolicy::default();
            let quiet = ClientLedger::new();
            let busy = ClientLedger::new();
            let mut now = 0;
            for gap in &noise {
                now += gap;
                busy.admit("other", VerbClass::List, t(now), &p);
            }
            prop_assert_eq!(busy.admit("me", VerbClass::List, t(now), &p), quiet.admit("me", VerbClass::List, t(now), &p));
        }
    }
}
