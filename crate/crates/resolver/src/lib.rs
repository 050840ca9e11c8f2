//! Maps DOIs and arXiv ids to 40-hex paper ids through the upstream paper
//! API, with an append-only on-disk cache and an offline mode.

mod cache;
mod id;
mod transport;

use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use litgraph_core::{NodeId, NodeLabel, PropertyGraph, PropertyValue};

pub use cache::{is_paper_id, CacheEntry, ResolutionCache};
pub use id::{ExternalId, IdKind, InvalidId};
pub use transport::{FixtureTransport, HttpResponse, HttpTransport, Transport, TransportError};

pub const DEFAULT_BASE_URL: &str = "https://api.semanticscholar.org";
pub const BASE_URL_ENV: &str = "LITGRAPH_RESOLVER_BASE";

#[derive(Debug, Clone, PartialEq)]
pub struct ResolverConfig {
    pub base_url: String,
    pub timeout: Duration,
    /// Never touch the network; cache misses fail with [`ResolveError::Offline`].
    pub offline: bool,
    pub max_attempts: usize,
    /// Sleep before the n-th retry; the last entry repeats.
    pub backoff: Vec<Duration>,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            base_url: DEFAULT_BASE_URL.to_owned(),
            timeout: Duration::from_secs(10),
            offline: false,
            max_attempts: 3,
            backoff: [250, 500, 1000].map(Duration::from_millis).to_vec(),
        }
    }
}

impl ResolverConfig {
    /// Defaults, with the base URL taken from `LITGRAPH_RESOLVER_BASE` when set.
    pub fn from_env() -> Self {
        let mut c = Self::default();
        if let Ok(base) = std::env::var(BASE_URL_ENV) {
            if !base.trim().is_empty() {
                c.base_url = base.trim().to_owned();
            }
        }
        c
    }

    fn delay_before_retry(&self, retry: usize) -> Duration {
        self.backoff.get(retry.min(self.backoff.len().saturating_sub(1))).copied().unwrap_or_default()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ResolveError {
    #[error("invalid id: {0}")]
    InvalidId(#[from] InvalidId),
    #[error("{0} not found upstream")]
    NotFound(ExternalId),
    #[error("resolving {id} failed after {attempts} attempt(s): {message}")]
    Upstream { id: ExternalId, attempts: usize, message: String },
    #[error("unexpected response for {id}: {message}")]
    MalformedResponse { id: ExternalId, message: String },
    #[error("{0} is not cached and the resolver is offline")]
    Offline(ExternalId),
    #[error("cache: {0}")]
    Cache(#[from] std::io::Error),
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        (**self).get(url)
    }
}

/// Safe to share between threads. Two concurrent misses for the same id may
/// both go to the network; both write the same value.
pub struct Resolver {
    config: ResolverConfig,
    transport: Box<dyn Transport>,
    cache: Mutex<ResolutionCache>,
}

enum Attempt {
    Done(Result<String, ResolveError>),
    Retry(String),
}

impl Resolver {
    pub fn new(config: ResolverConfig, transport: impl Transport + 'static, cache: ResolutionCache) -> Self {
        Resolver { config, transport: Box::new(transport), cache: Mutex::new(cache) }
    }

    pub fn http(config: ResolverConfig, cache: ResolutionCache) -> Self {
        let transport = HttpTransport::new(config.timeout);
        Self::new(config, transport, cache)
    }

    pub fn config(&self) -> &ResolverConfig {
        &self.config
    }

    pub fn url_for(&self, id: &ExternalId) -> String {
        format!("{}/v1/paper/{}", self.config.base_url.trim_end_matches('/'), id.request_key())
    }

    pub fn cached(&self, id: &ExternalId) -> Option<String> {
        self.lock_cache().get(id).map(|e| e.paper_id.clone())
    }

    fn lock_cache(&self) -> std::sync::MutexGuard<'_, ResolutionCache> {
        self.cache.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn resolve_str(&self, id: &str) -> Result<String, ResolveError> {
        self.resolve(&id.parse()?)
    }

    pub fn resolve(&self, id: &ExternalId) -> Result<String, ResolveError> {
        if let Some(hit) = self.cached(id) {
            return Ok(hit);
        }
        if self.config.offline {
            return Err(ResolveError::Offline(id.clone()));
        }
        let url = self.url_for(id);
        let attempts = self.config.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                thread::sleep(self.config.delay_before_retry(attempt - 1));
            }
            match self.attempt(id, &url) {
                Attempt::Done(Ok(paper_id)) => {
                    let fetched_at = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
                    self.lock_cache().insert(id.clone(), CacheEntry { paper_id: paper_id.clone(), fetched_at })?;
                    return Ok(paper_id);
                }
                Attempt::Done(Err(e)) => return Err(e),
                Attempt::Retry(message) => last = message,
            }
        }
        Err(ResolveError::Upstream { id: id.clone(), attempts, message: last })
    }

    fn attempt(&self, id: &ExternalId, url: &str) -> Attempt {
        let resp = match self.transport.get(url) {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.0),
        };
        match resp.status {
            200 => Attempt::Done(paper_id_from_body(id, &resp.body)),
            404 => Attempt::Done(Err(ResolveError::NotFound(id.clone()))),
            s if s >= 500 || s == 429 => Attempt::Retry(format!("HTTP {s}")),
            s => {
                Attempt::Done(Err(ResolveError::Upstream { id: id.clone(), attempts: 1, message: format!("HTTP {s}") }))
            }
        }
    }
}

fn paper_id_from_body(id: &ExternalId, body: &str) -> Result<String, ResolveError> {
    let malformed = |message: String| ResolveError::MalformedResponse { id: id.clone(), message };
    let json: serde_json::Value =
        serde_json::from_str(body).map_err(|e| malformed(format!("body is not JSON: {e}")))?;
    let paper_id =
        json.get("paperId").and_then(|v| v.as_str()).ok_or_else(|| malformed("no string `paperId` field".into()))?;
    if !is_paper_id(paper_id) {
        return Err(malformed(format!("`{paper_id}` is not a 40-character lowercase hex id")));
    }
    Ok(paper_id.to_owned())
}

/// Finds the Paper node for an external id. DOIs are first looked up in the
/// graph's own `doi` property; otherwise the id is resolved and matched
/// against `paper_id`.
pub fn find_paper(graph: &PropertyGraph, resolver: &Resolver, id: &ExternalId) -> Result<Option<NodeId>, ResolveError> {
    if id.kind() == IdKind::Doi {
        let local = graph.index_lookup(NodeLabel::Paper, "doi", &PropertyValue::from(id.value()));
        if let Some(&node) = local.first() {
            return Ok(Some(node));
        }
    }
    let paper_id = resolver.resolve(id)?;
    Ok(graph.index_lookup(NodeLabel::Paper, "paper_id", &PropertyValue::from(paper_id)).first().copied())
}
