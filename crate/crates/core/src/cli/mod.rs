//! The `eprint-oai` command line.
//!
//! Exit status is 0 on success, 1 when the work itself failed, and 2 for
//! usage and configuration errors.

mod config;

use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

pub use config::{CliConfig, CliConfigError};

use crate::clock::{Clock, FixedClock, OffsetClock, SystemClock};
use crate::crosswalk::{Crosswalk, CrosswalkTables};
use crate::datestamp::Datestamp;
use crate::flowcontrol::{FlowControl, FlowPolicy};
use crate::harvester::{self, HarvestJob, HarvestState, HarvestVerb, HttpTransport, LocalStore, Overlap, Transport};
use crate::id::{parse_internal_id, parse_oai_identifier, EprintId};
use crate::protocol::{Provider, RepositoryConfig};
use crate::server::{self, MAX_REBUILD_INTERVAL};
use crate::store::{Lookup, Store, StoreError};
use crate::taxonomy::TaxonomyConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_PORT: u16 = 8080;
const DEFAULT_MIN_INTERVAL_LIST: f64 = 10.0;
const DEFAULT_MIN_INTERVAL_OTHER: f64 = 1.0;
const DEFAULT_REBUILD_INTERVAL: f64 = 3600.0;
const LOOPBACK_CLIENT: &str = "loopback";

#[derive(Debug, Parser)]
#[command(name = "eprint-oai", version, about = "OAI v1.0 data provider and harvester for an e-print repository")]
pub struct Cli {
    /// TOML file of default settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Pin "now" (RFC 3339), e.g. 2001-01-22T10:08:02Z.
    #[arg(long, global = true, env = "OAI_NOW", value_name = "TIME")]
    now: Option<DateTime<Utc>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct StoreArgs {
    /// Store directory.
    #[arg(long, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    /// Taxonomy TOML (groups, archives, subject classes).
    #[arg(long, value_name = "FILE")]
    taxonomy: Option<PathBuf>,
    /// Repository identity TOML, as answered by Identify.
    #[arg(long, value_name = "FILE")]
    repository: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
struct ProviderArgs {
    #[command(flatten)]
    store: StoreArgs,
    /// Use the bundled demo corpus instead of a store directory.
    #[arg(long, conflicts_with = "data_dir")]
    demo: bool,
    /// Directory of crosswalk tables replacing the built-in ones file by file.
    #[arg(long, value_name = "DIR")]
    tables: Option<PathBuf>,
    /// At most this many records per list response.
    #[arg(long)]
    page_size: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Answer the protocol over HTTP.
    Serve {
        #[command(flatten)]
        provider: ProviderArgs,
        /// Advertised base URL; its path is where requests are answered.
        #[arg(long)]
        base_url: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        /// Address to bind.
        #[arg(long)]
        bind: Option<IpAddr>,
        /// Seconds a client must wait between list requests.
        #[arg(long)]
        min_interval_list: Option<f64>,
        /// Seconds a client must wait between other requests.
        #[arg(long)]
        min_interval_other: Option<f64>,
        /// Seconds between index rebuilds, at most one day.
        #[arg(long)]
        rebuild_interval: Option<f64>,
    },
    /// Add abs files to a store, creating it if needed.
    Ingest {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Mark an e-print deleted.
    Delete {
        #[command(flatten)]
        store: StoreArgs,
        /// Internal (`archive/YYMMNNN`) or OAI identifier.
        id: String,
        #[arg(long, default_value = "removed")]
        reason: String,
    },
    /// Write the bundled demo corpus into a store directory.
    InitDemo {
        #[arg(long, value_name = "DIR")]
        data_dir: Option<PathBuf>,
    },
    /// Print one record's metadata in one format.
    Crosswalk {
        #[command(flatten)]
        provider: ProviderArgs,
        /// Internal (`archive/YYMMNNN`) or OAI identifier.
        id: String,
        #[arg(long)]
        prefix: String,
    },
    /// Harvest a provider, remote or in-process.
    Harvest(HarvestArgs),
}

#[derive(Debug, Args)]
struct HarvestArgs {
    /// Remote provider. Without it the store given by --data-dir or --demo
    /// is harvested in-process.
    #[arg(long)]
    base_url: Option<String>,
    #[command(flatten)]
    provider: ProviderArgs,
    /// ListRecords in this format; without it, ListIdentifiers.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long)]
    from: Option<Datestamp>,
    #[arg(long)]
    until: Option<Datestamp>,
    #[arg(long)]
    set: Option<String>,
    /// Start from the last completed harvest recorded in the state file.
    #[arg(long)]
    incremental: bool,
    /// With --incremental, start the day after the last harvest instead of
    /// the day before it.
    #[arg(long, requires = "incremental")]
    no_overlap: bool,
    /// Harvest state file; defaults to state.json in --out-dir.
    #[arg(long, value_name = "FILE")]
    state_file: Option<PathBuf>,
    /// Directory receiving the harvested records.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    max_retries: u32,
    /// Seconds before an HTTP request is abandoned.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Operational(String),
}

impl From<CliConfigError> for Failure {
    fn from(e: CliConfigError) -> Self {
        Self::Usage(e.to_string())
    }
}

fn op(e: impl std::fmt::Display) -> Failure {
    Failure::Operational(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<(), Failure>;

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Operational(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAILURE
        }
    }
}

struct Context {
    file: CliConfig,
    now: Option<DateTime<Utc>>,
}

impl Context {
    fn clock(&self) -> Arc<dyn Clock> {
        match self.now {
            Some(t) => Arc::new(FixedClock(t)),
            None => Arc::new(SystemClock),
        }
    }

    /// A pinned start that still ticks, so flow-control intervals elapse.
    fn server_clock(&self) -> Arc<dyn Clock> {
        match self.now {
            Some(t) => Arc::new(OffsetClock::starting_at(t)),
            None => Arc::new(SystemClock),
        }
    }

    fn data_dir(&self, args: &StoreArgs) -> Option<PathBuf> {
        args.data_dir.clone().or_else(|| self.file.data_dir.clone())
    }

    fn taxonomy(&self, args: &StoreArgs) -> Result<Arc<TaxonomyConfig>, Failure> {
        match args.taxonomy.as_ref().or(self.file.taxonomy.as_ref()) {
            Some(p) => TaxonomyConfig::load(p).map(Arc::new).map_err(usage),
            None => Ok(Arc::new(TaxonomyConfig::demo())),
        }
    }

    fn repository(&self, args: &ProviderArgs, base_url: Option<&str>) -> Result<RepositoryConfig, Failure> {
        let mut c = match args.store.repository.as_ref().or(self.file.repository.as_ref()) {
            Some(p) => RepositoryConfig::load(p).map_err(usage)?,
            None => RepositoryConfig::demo(),
        };
        if let Some(u) = base_url.map(str::to_owned).or_else(|| self.file.base_url.clone()) {
            c.base_url = u;
        }
        if let Some(n) = args.page_size.or(self.file.page_size) {
            c.page_size = n;
        }
        c.validate().map_err(usage)?;
        Ok(c)
    }

    fn repository_name(&self, args: &StoreArgs) -> Result<String, Failure> {
        let p = ProviderArgs {
            store: args.clone(),
            ..ProviderArgs::default()
        };
        Ok(self.repository(&p, None)?.identifier.repository_identifier)
    }

    fn tables(&self, args: &ProviderArgs) -> Result<Arc<CrosswalkTables>, Failure> {
        match args.tables.as_ref().or(self.file.tables.as_ref()) {
            Some(dir) => CrosswalkTables::load_dir(dir).map(Arc::new).map_err(usage),
            None => Ok(Arc::new(CrosswalkTables::default())),
        }
    }

    fn open_store(&self, args: &StoreArgs, create: bool) -> Result<Store, Failure> {
        let dir = self
            .data_dir(args)
            .ok_or_else(|| usage("--data-dir is required"))?;
        let taxonomy = self.taxonomy(args)?;
        let repo = self.repository_name(args)?;
        if create {
            Store::open_or_create(&dir, taxonomy, &repo).map_err(op)
        } else {
            Store::open(&dir, taxonomy, &repo).map_err(op)
        }
    }

    fn provider(&self, args: &ProviderArgs, base_url: Option<&str>, clock: Arc<dyn Clock>) -> Result<Provider, Failure> {
        let config = self.repository(args, base_url)?;
        let taxonomy = self.taxonomy(&args.store)?;
        let store = if args.demo {
            crate::demo::store()
        } else {
            self.open_store(&args.store, false)?
        };
        let crosswalk = Crosswalk::new(self.tables(args)?, taxonomy);
        Ok(Provider::new(Arc::new(store), Arc::new(config), Arc::new(crosswalk), clock))
    }

    fn parse_id(&self, text: &str, repository: &str) -> Result<EprintId, Failure> {
        if text.starts_with("oai:") {
            parse_oai_identifier(text, repository).map_err(usage)
        } else {
            parse_internal_id(text).map_err(usage)
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Outcome {
    let file = match &cli.config {
        Some(p) => CliConfig::load(p)?,
        None => CliConfig::default(),
    };
    let cx = Context { file, now: cli.now };
    match cli.command {
        Command::Serve {
            provider,
            base_url,
            port,
            bind,
            min_interval_list,
            min_interval_other,
            rebuild_interval,
        } => {
            let list = config::seconds(
                "min-interval-list",
                min_interval_list.or(cx.file.min_interval_list).unwrap_or(DEFAULT_MIN_INTERVAL_LIST),
            )?;
            let other = config::seconds(
                "min-interval-other",
                min_interval_other.or(cx.file.min_interval_other).unwrap_or(DEFAULT_MIN_INTERVAL_OTHER),
            )?;
            let rebuild = config::seconds(
                "rebuild-interval",
                rebuild_interval.or(cx.file.rebuild_interval).unwrap_or(DEFAULT_REBUILD_INTERVAL),
            )?;
            if rebuild.is_zero() || rebuild > MAX_REBUILD_INTERVAL {
                return Err(usage("rebuild-interval must be more than 0 and at most 86400 seconds"));
            }
            let policy = FlowPolicy::new(list, other).map_err(usage)?;
            let provider = cx
                .provider(&provider, base_url.as_deref(), cx.server_clock())?
                .with_flow_control(FlowControl::new(policy));
            let addr = SocketAddr::new(
                bind.or(cx.file.bind).unwrap_or(IpAddr::V4(Ipv4Addr::LOCALHOST)),
                port.or(cx.file.port).unwrap_or(DEFAULT_PORT),
            );
            serve(provider, addr, rebuild, out)
        }
        Command::Ingest { store, files } => ingest(&cx, &store, &files, out),
        Command::Delete { store, id, reason } => {
            let s = cx.open_store(&store, false)?;
            let id = cx.parse_id(&id, s.repository())?;
            s.mark_deleted(&id, &reason, cx.clock().now()).map_err(op)?;
            let _ = writeln!(out, "deleted {id}");
            Ok(())
        }
        Command::InitDemo { data_dir } => {
            let dir = data_dir
                .or_else(|| cx.file.data_dir.clone())
                .ok_or_else(|| usage("--data-dir is required"))?;
            let s = crate::demo::write_to_dir(&dir).map_err(op)?;
            let _ = writeln!(out, "{} records in {}", s.len(), dir.display());
            Ok(())
        }
        Command::Crosswalk { provider, id, prefix } => {
            let p = cx.provider(&provider, None, cx.clock())?;
            let id = cx.parse_id(&id, p.store().repository())?;
            match p.store().get(&id) {
                Lookup::Found(r) => {
                    let rec = p.crosswalk().to_format(&r.meta, r.datestamp, &prefix).map_err(op)?;
                    let _ = write!(out, "{}", rec.to_xml_fragment());
                    Ok(())
                }
                Lookup::Deleted { .. } => Err(op(format!("{id} is deleted"))),
                Lookup::NotFound => Err(op(format!("{id} not found"))),
            }
        }
        Command::Harvest(args) => harvest(&cx, args, out),
    }
}

fn serve(provider: Provider, addr: SocketAddr, rebuild: Duration, out: &mut dyn Write) -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(op)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| op(format!("cannot bind {addr}: {e}")))?;
        let local = listener.local_addr().map_err(op)?;
        let _ = writeln!(out, "listening on http://{local}{}", provider.config().base_path());
        let _ = out.flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        server::serve(listener, Arc::new(provider), Some(rebuild), shutdown)
            .await
            .map_err(op)
    })
}

fn ingest(cx: &Context, args: &StoreArgs, files: &[PathBuf], out: &mut dyn Write) -> Outcome {
    let store = cx.open_store(args, true)?;
    let clock = cx.clock();
    let (mut ingested, mut duplicate, mut failed) = (0, 0, 0);
    for path in files {
        let result = std::fs::read(path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| match store.ingest(&bytes, clock.now()) {
                Ok(r) => Ok(Some(r)),
                Err(StoreError::Duplicate(_)) => Ok(None),
                Err(e) => Err(e.to_string()),
            });
        match result {
            Ok(Some(r)) => {
                ingested += 1;
                let _ = writeln!(out, "ingested {} {} datestamp {}", path.display(), r.meta.id, r.datestamp);
            }
            Ok(None) => {
                duplicate += 1;
                let _ = writeln!(out, "duplicate {} unchanged", path.display());
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(out, "failed {}: {e}", path.display());
            }
        }
    }
    let _ = writeln!(out, "{ingested} ingested, {failed} failed, {duplicate} duplicate");
    if failed > 0 {
        Err(op(format!("{failed} of {} files failed", files.len())))
    } else {
        Ok(())
    }
}

fn harvest(cx: &Context, a: HarvestArgs, out: &mut dyn Write) -> Outcome {
    let transport: Box<dyn Transport> = match &a.base_url {
        Some(_) => Box::new(HttpTransport::new(config::seconds("timeout", a.timeout)?)),
        None => {
            if !a.provider.demo && cx.data_dir(&a.provider.store).is_none() {
                return Err(usage("harvest needs --base-url, --data-dir or --demo"));
            }
            let p = cx.provider(&a.provider, None, cx.clock())?;
            Box::new(harvester::LoopbackTransport::new(p, LOOPBACK_CLIENT))
        }
    };
    let base_url = match &a.base_url {
        Some(u) => u.clone(),
        None => cx.repository(&a.provider, None)?.base_url,
    };
    let verb = match a.prefix {
        Some(metadata_prefix) => HarvestVerb::ListRecords { metadata_prefix },
        None => HarvestVerb::ListIdentifiers,
    };
    let job = HarvestJob {
        from: a.from,
        until: a.until,
        set: a.set,
        max_retries: a.max_retries,
        ..HarvestJob::new(&base_url, verb)
    };
    let mut local = match &a.out_dir {
        Some(d) => LocalStore::open(d).map_err(op)?,
        None => LocalStore::in_memory(),
    };
    let sleeper = harvester::ThreadSleeper;
    let report = if a.incremental {
        let state_file = a
            .state_file
            .clone()
            .or_else(|| cx.file.state_file.clone())
            .or_else(|| a.out_dir.as_ref().map(|d| d.join("state.json")))
            .ok_or_else(|| usage("--incremental needs --state-file or --out-dir"))?;
        let state = HarvestState::load(&state_file).map_err(op)?;
        let overlap = if a.no_overlap { Overlap::Disabled } else { Overlap::OneDay };
        let today = Datestamp::of(cx.clock().now());
        let r = harvester::incremental(&state, &job, today, overlap, &mut local, transport.as_ref(), &sleeper)
            .map_err(|e| harvest_failure(&e, out))?;
        r.state.save(&state_file).map_err(op)?;
        let from = r.from.map_or_else(|| "(start)".to_owned(), |d| d.to_string());
        let _ = writeln!(out, "from {from}; state {} -> {today}", state_file.display());
        let _ = writeln!(
            out,
            "{} inserted, {} updated, {} unchanged",
            r.upserted.inserted, r.upserted.updated, r.upserted.unchanged
        );
        r.outcome.report
    } else {
        let o = harvester::run(&job, transport.as_ref(), &sleeper).map_err(|e| harvest_failure(&e, out))?;
        let s = local.upsert_all(&o.records).map_err(op)?;
        let _ = writeln!(out, "{} inserted, {} updated, {} unchanged", s.inserted, s.updated, s.unchanged);
        o.report
    };
    local.compact().map_err(op)?;
    let _ = writeln!(out, "{report}");
    if let Some(d) = &a.out_dir {
        let _ = writeln!(out, "{} records in {}", local.len(), d.display());
    }
    Ok(())
}

fn harvest_failure(e: &harvester::HarvestError, out: &mut dyn Write) -> Failure {
    let _ = writeln!(out, "partial: {}", e.partial.report);
    op(e)
}
