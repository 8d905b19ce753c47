//! C ABI over the `eprint-oai` provider.
//!
//! Every function returns an [`OaiStatus`]; on anything but `Ok` the reason
//! is available from [`oai_last_error_message`] on the same thread. Strings
//! handed out by this library are freed with [`oai_string_free`], responses
//! with [`oai_response_free`], providers with [`oai_provider_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use chrono::{DateTime, Utc};
use eprint_oai::clock::Clock;
use eprint_oai::crosswalk::{tex_to_utf8, Crosswalk, CrosswalkTables};
use eprint_oai::flowcontrol::{FlowControl, FlowPolicy};
use eprint_oai::id::parse_oai_identifier;
use eprint_oai::protocol::{Provider, RepositoryConfig};
use eprint_oai::store::Store;
use eprint_oai::taxonomy::TaxonomyConfig;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OaiStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Panic = 5,
}

/// Opaque provider handle.
pub struct OaiProvider {
    provider: Provider,
    clock: Arc<PinnableClock>,
}

/// One protocol response. `content_type` and `body` are NUL-terminated and
/// owned by the library until [`oai_response_free`].
#[repr(C)]
pub struct OaiResponse {
    pub http_status: u16,
    pub content_type: *mut c_char,
    pub body: *mut c_char,
    /// Milliseconds to wait on a 503, rounded up; 0 otherwise.
    pub retry_after_ms: u64,
}

/// System time unless pinned.
#[derive(Default)]
struct PinnableClock(Mutex<Option<DateTime<Utc>>>);

impl Clock for PinnableClock {
    fn now(&self) -> DateTime<Utc> {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).unwrap_or_else(Utc::now)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(OaiStatus, String);

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OaiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OaiStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OaiStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(OaiStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(OaiStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// As [`text`], but null maps to `None`.
unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\u{FFFD}")).expect("NUL removed").into_raw()
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(OaiStatus::InvalidArgument, e.to_string())
}

fn io(e: impl std::fmt::Display) -> Fail {
    Fail(OaiStatus::Io, e.to_string())
}

fn build(store: Store, config: RepositoryConfig, taxonomy: Arc<TaxonomyConfig>) -> Box<OaiProvider> {
    let clock = Arc::new(PinnableClock::default());
    let crosswalk = Crosswalk::new(Arc::new(CrosswalkTables::default()), taxonomy);
    let provider = Provider::new(Arc::new(store), Arc::new(config), Arc::new(crosswalk), clock.clone());
    Box::new(OaiProvider { provider, clock })
}

/// Open the bundled demo corpus.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_open_demo(out: *mut *mut OaiProvider) -> OaiStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(OaiStatus::NullArgument, "out is null".into()));
        }
        let h = build(
            eprint_oai::demo::store(),
            RepositoryConfig::demo(),
            eprint_oai::demo::taxonomy(),
        );
        *out = Box::into_raw(h);
        Ok(())
    })
}

/// Open a store directory. `repository_toml` and `taxonomy_toml` are file
/// paths and may be null to use the built-in ones.
///
/// # Safety
/// String arguments are null or NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_open_dir(
    data_dir: *const c_char,
    repository_toml: *const c_char,
    taxonomy_toml: *const c_char,
    out: *mut *mut OaiProvider,
) -> OaiStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(OaiStatus::NullArgument, "out is null".into()));
        }
        let dir = text(data_dir, "data_dir")?;
        let config = match opt_text(repository_toml, "repository_toml")? {
            Some(p) => RepositoryConfig::load(Path::new(p)).map_err(invalid)?,
            None => RepositoryConfig::demo(),
        };
        let taxonomy = match opt_text(taxonomy_toml, "taxonomy_toml")? {
            Some(p) => TaxonomyConfig::load(Path::new(p)).map_err(invalid)?,
            None => TaxonomyConfig::demo(),
        };
        let taxonomy = Arc::new(taxonomy);
        let store = Store::open(Path::new(dir), taxonomy.clone(), &config.identifier.repository_identifier)
            .map_err(io)?;
        *out = Box::into_raw(build(store, config, taxonomy));
        Ok(())
    })
}

/// Pin the provider clock to an RFC 3339 instant, or unpin it with null.
///
/// # Safety
/// `provider` comes from an open function; `now` is null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_set_now(provider: *mut OaiProvider, now: *const c_char) -> OaiStatus {
    guard(|| {
        let h = provider
            .as_ref()
            .ok_or_else(|| Fail(OaiStatus::NullArgument, "provider is null".into()))?;
        let pinned = match opt_text(now, "now")? {
            Some(t) => Some(t.parse::<DateTime<Utc>>().map_err(invalid)?),
            None => None,
        };
        *h.clock.0.lock().unwrap_or_else(|e| e.into_inner()) = pinned;
        Ok(())
    })
}

/// Turn on flow control with the given minimum intervals in seconds.
///
/// # Safety
/// `provider` comes from an open function and is not in use on another thread.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_set_flow_control(
    provider: *mut OaiProvider,
    min_interval_list_s: f64,
    min_interval_other_s: f64,
) -> OaiStatus {
    guard(|| {
        let h = provider
            .as_mut()
            .ok_or_else(|| Fail(OaiStatus::NullArgument, "provider is null".into()))?;
        let secs = |v: f64| Duration::try_from_secs_f64(v).map_err(invalid);
        let policy = FlowPolicy::new(secs(min_interval_list_s)?, secs(min_interval_other_s)?).map_err(invalid)?;
        h.provider = h.provider.clone().with_flow_control(FlowControl::new(policy));
        Ok(())
    })
}

/// Answer one request. `query` is a form-encoded argument string such as
/// `verb=GetRecord&identifier=...`; `client` keys flow control.
///
/// # Safety
/// `provider` comes from an open function; strings are NUL-terminated; `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_handle(
    provider: *const OaiProvider,
    client: *const c_char,
    query: *const c_char,
    out: *mut OaiResponse,
) -> OaiStatus {
    guard(|| {
        let h = provider
            .as_ref()
            .ok_or_else(|| Fail(OaiStatus::NullArgument, "provider is null".into()))?;
        if out.is_null() {
            return Err(Fail(OaiStatus::NullArgument, "out is null".into()));
        }
        let client = text(client, "client")?;
        let query = text(query, "query")?;
        let r = h.provider.handle_query(client, query);
        let retry_after_ms = r
            .retry_after
            .map_or(0, |d| d.as_nanos().div_ceil(1_000_000).try_into().unwrap_or(u64::MAX));
        out.write(OaiResponse {
            http_status: r.status,
            content_type: owned(r.content_type.to_owned()),
            body: owned(r.body),
            retry_after_ms,
        });
        Ok(())
    })
}

/// Release the strings inside a response and null them out.
///
/// # Safety
/// `response` is null or was filled by [`oai_provider_handle`].
#[no_mangle]
pub unsafe extern "C" fn oai_response_free(response: *mut OaiResponse) {
    if let Some(r) = response.as_mut() {
        oai_string_free(r.content_type);
        oai_string_free(r.body);
        r.content_type = ptr::null_mut();
        r.body = ptr::null_mut();
    }
}

/// # Safety
/// `provider` is null or came from an open function and is not used again.
#[no_mangle]
pub unsafe extern "C" fn oai_provider_free(provider: *mut OaiProvider) {
    if !provider.is_null() {
        drop(Box::from_raw(provider));
    }
}

/// Map an OAI identifier such as `oai:arXiv:cs.DL/0101042` in `repository`
/// to its internal form.
///
/// # Safety
/// Strings are NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oai_parse_identifier(
    identifier: *const c_char,
    repository: *const c_char,
    out: *mut *mut c_char,
) -> OaiStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(OaiStatus::NullArgument, "out is null".into()));
        }
        let id = parse_oai_identifier(text(identifier, "identifier")?, text(repository, "repository")?)
            .map_err(invalid)?;
        *out = owned(id.to_string());
        Ok(())
    })
}

/// Convert TeX accent and glyph markup to UTF-8 with the built-in tables.
///
/// # Safety
/// `input` is NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn oai_tex_to_utf8(input: *const c_char, out: *mut *mut c_char) -> OaiStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(OaiStatus::NullArgument, "out is null".into()));
        }
        let tables = default_tables();
        *out = owned(tex_to_utf8(text(input, "input")?, tables));
        Ok(())
    })
}

fn default_tables() -> &'static CrosswalkTables {
    static TABLES: std::sync::OnceLock<CrosswalkTables> = std::sync::OnceLock::new();
    TABLES.get_or_init(CrosswalkTables::default)
}

/// # Safety
/// `s` is null or came from this library and is not used again.
#[no_mangle]
pub unsafe extern "C" fn oai_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oai_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
