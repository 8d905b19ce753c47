#![allow(dead_code)]

pub mod corpus;
pub mod gold;
pub mod pages;

use std::path::PathBuf;
use std::sync::Arc;

use eprint_oai::clock::Clock;
use eprint_oai::protocol::{Provider, RepositoryConfig};
use eprint_oai::store::Store;

pub fn fixture(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// A provider over `store` with the demo identity, demo crosswalk and the
/// given page size.
pub fn provider_over(store: Store, page_size: usize, clock: Arc<dyn Clock>) -> Provider {
    let config = RepositoryConfig {
        page_size,
        ..RepositoryConfig::demo()
    };
    Provider::new(
        Arc::new(store),
        Arc::new(config),
        Arc::new(eprint_oai::demo::crosswalk()),
        clock,
    )
}

pub fn empty_store() -> Store {
    Store::in_memory(eprint_oai::demo::taxonomy(), corpus::REPOSITORY)
}
