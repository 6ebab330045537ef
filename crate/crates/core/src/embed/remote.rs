//! HTTP client for an external sentence-encoder service.
//!
//! Wire contract: `POST {base}/embed` with `{"texts": [...]}` answers
//! `{"dim": n, "vectors": [[...], ...]}`, one vector per text in order
//! (`null` for a text the service rejected). `GET {base}/health` answers
//! `{"status": "ok", "model": name, "dim": n}`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingProvider, EmbeddingVector, FileStore, ProviderInfo};
use crate::text;

/// Environment variable consulted for the service location.
pub const ENDPOINT_ENV: &str = "EMBED_ENDPOINT";

#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay: Duration::from_millis(200) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct Health {
    pub status: String,
    pub model: String,
    pub dim: usize,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    vectors: Vec<Option<Vec<f64>>>,
}

type Cache = HashMap<String, Option<EmbeddingVector>>;

/// Remote provider with an in-process cache keyed by normalized text.
pub struct RemoteClient {
    base: String,
    name: String,
    agent: ureq::Agent,
    retry: RetryPolicy,
    batch_size: usize,
    cache: Mutex<Cache>,
    dim: OnceLock<usize>,
    requests: AtomicUsize,
    write_through: Option<PathBuf>,
}

impl RemoteClient {
    /// `endpoint` is the service base URL; a trailing `/embed` is accepted.
    pub fn new(endpoint: &str) -> Self {
        let base = endpoint.trim_end_matches('/').trim_end_matches("/embed").to_owned();
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteClient {
            name: format!("remote:{base}"),
            base,
            agent,
            retry: RetryPolicy::default(),
            batch_size: 256,
            cache: Mutex::new(HashMap::new()),
            dim: OnceLock::new(),
            requests: AtomicUsize::new(0),
            write_through: None,
        }
    }

    /// Endpoint from [`ENDPOINT_ENV`], if set.
    pub fn from_env() -> Option<Self> {
        std::env::var(ENDPOINT_ENV).ok().filter(|s| !s.is_empty()).map(|e| Self::new(&e))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    /// Rewrite `path` as a vector file whenever new vectors arrive.
    pub fn with_write_through(mut self, path: impl Into<PathBuf>) -> Self {
        self.write_through = Some(path.into());
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.base
    }

    /// HTTP requests issued so far, retries included.
    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn health(&self) -> Result<Health, EmbedError> {
        let url = format!("{}/health", self.base);
        let body = self.with_retries(|| {
            self.requests.fetch_add(1, Ordering::SeqCst);
            self.agent.get(&url).call()
        })?;
        serde_json::from_str(&body).map_err(|e| EmbedError::Protocol(format!("bad /health body: {e}")))
    }

    /// Cached vectors as a file store, e.g. to freeze a run into a fixture.
    pub fn snapshot(&self) -> FileStore {
        let cache = self.cache.lock().expect("cache lock");
        snapshot_of(&self.name, &cache)
    }

    fn transport(&self, message: impl Into<String>) -> EmbedError {
        EmbedError::Transport { endpoint: self.base.clone(), message: message.into() }
    }

    fn with_retries<F>(&self, mut call: F) -> Result<String, EmbedError>
    where
        F: FnMut() -> Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    {
        let mut last = None;
        for attempt in 0..self.retry.attempts.max(1) {
            if attempt > 0 {
                std::thread::sleep(self.retry.base_delay * 2u32.pow(attempt - 1));
            }
            match call() {
                Ok(resp) => {
                    let status = resp.status();
                    let body = resp.into_body().read_to_string();
                    if status.is_server_error() {
                        last = Some(self.transport(format!("HTTP {status}")));
                        continue;
                    }
                    if !status.is_success() {
                        return Err(EmbedError::Protocol(format!("HTTP {status}")));
                    }
                    return body.map_err(|e| EmbedError::Protocol(format!("unreadable body: {e}")));
                }
                Err(e) => {
                    log::warn!("embedding request to {} failed (attempt {}): {e}", self.base, attempt + 1);
                    last = Some(self.transport(e.to_string()));
                }
            }
        }
        Err(last.unwrap_or_else(|| self.transport("no attempt made")))
    }

    fn fetch(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        let url = format!("{}/embed", self.base);
        let body = self.with_retries(|| {
            self.requests.fetch_add(1, Ordering::SeqCst);
            self.agent.post(&url).send_json(EmbedRequest { texts })
        })?;
        let resp: EmbedResponse =
            serde_json::from_str(&body).map_err(|e| EmbedError::Protocol(format!("bad /embed body: {e}")))?;
        if resp.vectors.len() != texts.len() {
            return Err(EmbedError::Protocol(format!("{} vectors for {} texts", resp.vectors.len(), texts.len())));
        }
        let dim = *self.dim.get_or_init(|| resp.dim);
        if resp.dim != dim {
            return Err(EmbedError::Protocol(format!("dimension changed from {dim} to {}", resp.dim)));
        }
        resp.vectors
            .into_iter()
            .map(|v| match v {
                None => Ok(None),
                Some(values) if values.len() == dim => {
                    EmbeddingVector::new(values).map(Some).map_err(|e| EmbedError::Protocol(e.to_string()))
                }
                Some(values) => {
                    Err(EmbedError::Protocol(format!("vector of length {} in a dim-{dim} response", values.len())))
                }
            })
            .collect()
    }
}

fn snapshot_of(name: &str, cache: &Cache) -> FileStore {
    let mut store = FileStore::new(name);
    let mut keys: Vec<&String> = cache.keys().collect();
    keys.sort();
    for k in keys {
        if let Some(v) = &cache[k] {
            store.insert(k, v.clone()).expect("cached vectors share one dimension");
        }
    }
    store
}

impl EmbeddingProvider for RemoteClient {
    fn info(&self) -> ProviderInfo {
        ProviderInfo { name: self.name.clone(), dim: self.dim.get().copied(), languages: vec![] }
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        let keys: Vec<String> = texts.iter().map(|t| text::normalize(t)).collect();
        let missing: Vec<String> = {
            let cache = self.cache.lock().expect("cache lock");
            let mut seen = std::collections::HashSet::new();
            keys.iter().filter(|k| !cache.contains_key(*k) && seen.insert(k.as_str())).cloned().collect()
        };
        for chunk in missing.chunks(self.batch_size) {
            let vectors = self.fetch(chunk)?;
            let mut cache = self.cache.lock().expect("cache lock");
            for (k, v) in chunk.iter().zip(vectors) {
                // First writer wins so concurrent callers agree.
                cache.entry(k.clone()).or_insert(v);
            }
            if let Some(path) = &self.write_through {
                snapshot_of(&self.name, &cache).write(path)?;
            }
        }
        let cache = self.cache.lock().expect("cache lock");
        Ok(keys.iter().map(|k| cache.get(k).cloned().flatten()).collect())
    }
}
