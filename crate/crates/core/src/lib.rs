//! OAI protocol v1.0 data provider and harvester for an e-print repository
//! organised as groups, archives and subject classes.
//!
//! [`store`] keeps one abs file per e-print with a datestamp index,
//! [`crosswalk`] renders stored metadata as `oai_dc`, `oai_rfc1807`, `arXiv`
//! and `arXivOld`, [`protocol`] answers the six verbs with resumption tokens,
//! [`flowcontrol`] enforces per-client request intervals with 503 and
//! Retry-After, and [`harvester`] is the matching client. [`server`] puts the
//! provider behind HTTP; [`cli`] is the `eprint-oai` binary.

pub mod cli;
pub mod clock;
pub mod crosswalk;
pub mod datestamp;
pub mod demo;
pub mod flowcontrol;
pub mod harvester;
pub mod id;
pub mod protocol;
pub mod server;
pub mod store;
pub mod taxonomy;
pub mod xml;
