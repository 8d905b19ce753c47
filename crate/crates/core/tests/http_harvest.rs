//! A harvest over real HTTP against a flow-controlled server.

use std::sync::Arc;
use std::time::Duration;

use eprint_oai::clock::SystemClock;
use eprint_oai::flowcontrol::{FlowControl, FlowPolicy};
use eprint_oai::harvester::{run, HarvestJob, HarvestVerb, HttpTransport, ThreadSleeper};
use tokio::net::TcpListener;

#[tokio::test(flavor = "multi_thread")]
async fn harvests_through_retry_after() {
    let policy = FlowPolicy::new(Duration::from_secs(1), Duration::from_millis(100)).unwrap();
    let provider = Arc::new(eprint_oai::demo::provider(Arc::new(SystemClock)).with_flow_control(FlowControl::new(policy)));
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(eprint_oai::server::serve(listener, provider, None, async {
        rx.await.ok();
    }));
    let job = HarvestJob::new(
        &format!("http://{addr}/oai1"),
        HarvestVerb::ListRecords {
            metadata_prefix: "oai_dc".into(),
        },
    );
    let outcome = tokio::task::spawn_blocking(move || run(&job, &HttpTransport::new(Duration::from_secs(10)), &ThreadSleeper))
        .await
        .unwrap()
        .unwrap();
    assert_eq!(outcome.records.len(), 63);
    assert_eq!(outcome.report.pages, 2);
    assert!(outcome.report.unavailable_503 >= 1, "{}", outcome.report);
    assert!(outcome.report.waited >= Duration::from_secs(1));
    tx.send(()).unwrap();
    server.await.unwrap().unwrap();
}
