//! HTTP front end for a [`Provider`].

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{ConnectInfo, RawQuery, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;

use crate::flowcontrol::retry_after_header;
use crate::protocol::{Provider, VerbResponse};

/// Longest allowed gap between index rebuilds; datestamps have day resolution.
pub const MAX_REBUILD_INTERVAL: Duration = Duration::from_secs(24 * 60 * 60);

fn client_key(provider: &Provider, addr: SocketAddr) -> String {
    match provider.flow_control() {
        Some(flow) => flow.key(addr.ip()),
        None => addr.ip().to_string(),
    }
}

async fn answer(provider: Arc<Provider>, addr: SocketAddr, query: String) -> Response {
    let started = Instant::now();
    let client = client_key(&provider, addr);
    let pairs: Vec<(String, String)> = url::form_urlencoded::parse(query.as_bytes()).into_owned().collect();
    let verb = pairs
        .iter()
        .find(|(k, _)| k == "verb")
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    let r = {
        let client = client.clone();
        tokio::task::spawn_blocking(move || provider.handle(&client, &pairs))
            .await
            .unwrap_or_else(|e| VerbResponse::malformed(&format!("internal error: {e}")))
    };
    tracing::info!(
        client = %client,
        verb = %verb,
        status = r.status,
        duration_ms = started.elapsed().as_secs_f64() * 1e3,
        "request"
    );
    into_response(r)
}

fn into_response(r: VerbResponse) -> Response {
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static(r.content_type));
    if let Some(wait) = r.retry_after {
        headers.insert(header::RETRY_AFTER, HeaderValue::from(retry_after_header(wait)));
    }
    (status, headers, r.body).into_response()
}

async fn get_handler(
    State(provider): State<Arc<Provider>>,
    ConnectInfo(addr): ConnectInfo<SocketAddr>,
    RawQuery(query): RawQuery,
) -> Response {
    answer(provider, addr, query.unwrap_or_default()).await
}

/// Form-encoded arguments in the body, plus any in the query string.
async fn post_handler(
    State(provider): State<Arc<Provider>>,
    ConnectInfo(addr): ConnectInfo<SocketAddr>,
    RawQuery(query): RawQuery,
    body: Bytes,
) -> Response {
    let body = String::from_utf8_lossy(&body);
    let query = match query.filter(|q| !q.is_empty()) {
        Some(q) if !body.is_empty() => format!("{q}&{body}"),
        Some(q) => q,
        None => body.into_owned(),
    };
    answer(provider, addr, query).await
}

/// Routes the protocol at the configured base path.
pub fn router(provider: Arc<Provider>) -> Router {
    let path = provider.config().base_path();
    Router::new()
        .route(&path, get(get_handler).post(post_handler))
        .with_state(provider)
}

/// Serve until `shutdown` resolves. With `rebuild_every`, the store index is
/// rebuilt on that cadence and idle flow-control entries are dropped.
pub async fn serve(
    listener: TcpListener,
    provider: Arc<Provider>,
    rebuild_every: Option<Duration>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Some(every) = rebuild_every {
        let p = provider.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            tick.tick().await;
            loop {
                tick.tick().await;
                let p = p.clone();
                let result = tokio::task::spawn_blocking(move || {
                    let now = p.clock().now();
                    if let Some(flow) = p.flow_control() {
                        flow.evict_idle(now);
                    }
                    p.store().rebuild_index(now).map(|i| i.len())
                })
                .await;
                match result {
                    Ok(Ok(n)) => tracing::info!(entries = n, "index rebuilt"),
                    Ok(Err(e)) => tracing::error!(error = %e, "index rebuild failed"),
                    Err(e) => tracing::error!(error = %e, "index rebuild panicked"),
                }
            }
        });
    }
    let app = router(provider).into_make_service_with_connect_info::<SocketAddr>();
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}
