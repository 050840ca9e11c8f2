//! HTTP access behind a trait so tests can substitute recorded responses.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Network-level failure: no HTTP status was received.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        HttpTransport { agent }
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let mut resp = self.agent.get(url).call().map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

/// Replays recorded responses keyed by request path (the URL with its base
/// removed) and counts every call.
#[derive(Default)]
pub struct FixtureTransport {
    responses: HashMap<String, Vec<Result<HttpResponse, TransportError>>>,
    calls: AtomicUsize,
    served: Mutex<HashMap<String, usize>>,
}

impl FixtureTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a JSON array of `{"path", "status", "body"}` records. A `body`
    /// that is not a string is stored as its JSON text.
    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let records: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let mut t = Self::new();
        for r in records.as_array().into_iter().flatten() {
            let invalid = || std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad fixture record {r}"));
            let path = r["path"].as_str().ok_or_else(invalid)?;
            let status = r["status"].as_u64().ok_or_else(invalid)? as u16;
            let body = match &r["body"] {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t = t.with(path, status, &body);
        }
        Ok(t)
    }

    pub fn with(mut self, path: &str, status: u16, body: &str) -> Self {
        self.responses.entry(path.to_owned()).or_default().push(Ok(HttpResponse { status, body: body.to_owned() }));
        self
    }

    /// Queues a network failure for `path`.
    pub fn with_failure(mut self, path: &str, message: &str) -> Self {
        self.responses.entry(path.to_owned()).or_default().push(Err(TransportError(message.to_owned())));
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for FixtureTransport {
    /// Queued responses for a path are replayed in order; the last one
    /// repeats. Unknown paths answer 404.
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let key = url.find("/v1/").map_or(url, |i| &url[i..]);
        let Some(queue) = self.responses.get(key) else {
            return Ok(HttpResponse { status: 404, body: r#"{"error":"Paper not found"}"#.into() });
        };
        let mut served = self.served.lock().unwrap_or_else(|e| e.into_inner());
        let n = served.entry(key.to_owned()).or_insert(0);
        let response = queue[(*n).min(queue.len() - 1)].clone();
        *n += 1;
        response
    }
}
