use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use url::Url;

use super::IngestError;

const MAX_BODY_BYTES: u64 = 1 << 30;

/// Retrieves the bytes behind a URL.
pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &Url) -> Result<Vec<u8>, IngestError>;
}

/// `http(s)://` through a blocking agent, `file://` from disk.
pub struct NetFetcher {
    agent: ureq::Agent,
}

impl Default for NetFetcher {
    fn default() -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(30))
            .user_agent(concat!("corpus-forge/", env!("CARGO_PKG_VERSION")))
            .build();
        NetFetcher { agent }
    }
}

impl Fetcher for NetFetcher {
    fn fetch(&self, url: &Url) -> Result<Vec<u8>, IngestError> {
        let fail = |message: String| IngestError::Fetch { url: url.to_string(), message };
        match url.scheme() {
            "file" => {
                let path = url.to_file_path().map_err(|_| fail("not a local path".into()))?;
                std::fs::read(&path).map_err(|e| fail(e.to_string()))
            }
            "http" | "https" => {
                let resp = self.agent.request_url("GET", url).call().map_err(|e| fail(e.to_string()))?;
                let mut body = Vec::new();
                resp.into_reader()
                    .take(MAX_BODY_BYTES)
                    .read_to_end(&mut body)
                    .map_err(|e| fail(e.to_string()))?;
                Ok(body)
            }
            other => Err(fail(format!("unsupported scheme {other:?}"))),
        }
    }
}

/// Enforces a minimum gap between requests to the same host and records
/// when each request was let through.
pub struct RateLimiter {
    min_gap: Duration,
    state: Mutex<HashMap<String, Vec<Instant>>>,
}

impl RateLimiter {
    pub fn new(min_gap_s: f64) -> Self {
        RateLimiter { min_gap: Duration::from_secs_f64(min_gap_s.max(0.0)), state: Mutex::new(HashMap::new()) }
    }

    /// Blocks until a request to `url`'s host is allowed. Slots are
    /// reserved under the lock and slept on outside it, so other hosts are
    /// not held up.
    pub fn wait(&self, url: &Url) {
        let host = url.host_str().unwrap_or("").to_string();
        let slot = {
            let mut state = self.state.lock().expect("rate limiter poisoned");
            let times = state.entry(host).or_default();
            let now = Instant::now();
            let slot = times.last().map_or(now, |&last| (last + self.min_gap).max(now));
            times.push(slot);
            slot
        };
        let now = Instant::now();
        if slot > now {
            std::thread::sleep(slot - now);
        }
    }

    /// Request instants per host, in order.
    pub fn history(&self) -> HashMap<String, Vec<Instant>> {
        self.state.lock().expect("rate limiter poisoned").clone()
    }

    pub fn requests(&self) -> usize {
        self.state.lock().expect("rate limiter poisoned").values().map(Vec::len).sum()
    }
}

pub fn url_hash(url: &Url) -> String {
    hex::encode(Sha256::digest(url.as_str().as_bytes()))
}

/// Content cache: `<dir>/pages/<hash>` and `<dir>/audio/<hash>.wav`.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheKind {
    Page,
    Audio,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: CacheKind, url: &Url) -> PathBuf {
        let h = url_hash(url);
        match kind {
            CacheKind::Page => self.dir.join("pages").join(h),
            CacheKind::Audio => self.dir.join("audio").join(format!("{h}.wav")),
        }
    }

    pub fn get(&self, kind: CacheKind, url: &Url) -> Option<Vec<u8>> {
        std::fs::read(self.path(kind, url)).ok()
    }

    pub fn put(&self, kind: CacheKind, url: &Url, bytes: &[u8]) -> Result<PathBuf, IngestError> {
        let path = self.path(kind, url);
        let io = |source| IngestError::Io { path: path.display().to_string(), source };
        std::fs::create_dir_all(path.parent().expect("cache path has a parent")).map_err(io)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, bytes).map_err(io)?;
        std::fs::rename(&tmp, &path).map_err(io)?;
        Ok(path)
    }

    /// Cached bytes, or a rate-limited fetch that is then cached.
    pub fn fetch_through(
        &self,
        kind: CacheKind,
        url: &Url,
        fetcher: &dyn Fetcher,
        limiter: &RateLimiter,
    ) -> Result<(PathBuf, Vec<u8>), IngestError> {
        if let Some(bytes) = self.get(kind, url) {
            return Ok((self.path(kind, url), bytes));
        }
        limiter.wait(url);
        let bytes = fetcher.fetch(url)?;
        let path = self.put(kind, url, &bytes)?;
        Ok((path, bytes))
    }
}
