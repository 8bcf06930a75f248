//! Config-driven, rate-limited scraping of (transcript, audio) pairs into a
//! local cache, producing scraped utterances.

mod extract;
mod fetch;

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use url::Url;

use crate::audio::decode_wav;
use crate::corpus::{Dialect, Source, SourceKind, Utterance};

pub use extract::{extract, Extracted, ExtractionRules, SelectorExpr};
pub use fetch::{url_hash, Cache, CacheKind, Fetcher, NetFetcher, RateLimiter};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{url}: {message}")]
    Fetch { url: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("selector {expr:?}: {message}")]
    Selector { expr: String, message: String },
    #[error("bad seed {seed:?}: {message}")]
    Seed { seed: String, message: String },
    #[error("source {0}: rate_limit must be positive")]
    RateLimit(String),
    #[error("source {0}: crawl produced no records")]
    NoRecords(String),
}

fn default_rate_limit() -> f64 {
    1.0
}

fn default_max_pages() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub name: String,
    pub kind: SourceKind,
    /// Dialect for records whose page does not state one.
    #[serde(default)]
    pub dialect: Option<Dialect>,
    pub seed_urls: Vec<String>,
    pub rules: ExtractionRules,
    /// Minimum seconds between requests to one host.
    #[serde(default = "default_rate_limit")]
    pub rate_limit: f64,
    #[serde(default = "default_max_pages")]
    pub max_pages: usize,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
            return Err(IngestError::RateLimit(self.name.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub source_url: String,
    pub text: String,
    pub audio_url: String,
    pub dialect: Option<String>,
    pub fetched_at: String,
}

/// Absolute URLs pass through; anything else is a path relative to
/// `base_dir`.
pub fn resolve_seed(seed: &str, base_dir: &Path) -> Result<Url, IngestError> {
    if let Ok(u) = Url::parse(seed) {
        return Ok(u);
    }
    let path = base_dir.join(seed);
    let abs = std::path::absolute(&path).map_err(|e| IngestError::Seed { seed: seed.into(), message: e.to_string() })?;
    Url::from_file_path(&abs).map_err(|_| IngestError::Seed { seed: seed.into(), message: "not a valid path".into() })
}

fn mtime_rfc3339(path: &Path) -> String {
    let t = std::fs::metadata(path).and_then(|m| m.modified()).map(chrono::DateTime::<chrono::Utc>::from);
    t.unwrap_or_else(|_| chrono::Utc::now()).to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Debug, Default)]
pub struct CrawlOutput {
    pub records: Vec<RawRecord>,
    pub pages: usize,
    pub failures: Vec<(String, String)>,
}

/// Breadth-first crawl from the seeds, reading pages through the cache.
pub fn crawl(
    source: &SourceConfig,
    base_dir: &Path,
    cache: &Cache,
    fetcher: &dyn Fetcher,
    limiter: &RateLimiter,
) -> Result<CrawlOutput, IngestError> {
    source.validate()?;
    let mut queue: VecDeque<Url> = VecDeque::new();
    let mut seen: HashSet<Url> = HashSet::new();
    for s in &source.seed_urls {
        let u = resolve_seed(s, base_dir)?;
        if seen.insert(u.clone()) {
            queue.push_back(u);
        }
    }
    let mut out = CrawlOutput::default();
    let mut keys: HashSet<(String, String)> = HashSet::new();
    while let Some(url) = queue.pop_front() {
        if out.pages >= source.max_pages {
            break;
        }
        out.pages += 1;
        let (path, bytes) = match cache.fetch_through(CacheKind::Page, &url, fetcher, limiter) {
            Ok(v) => v,
            Err(e) => {
                log::warn!("{e}");
                out.failures.push((url.to_string(), e.to_string()));
                continue;
            }
        };
        let fetched_at = mtime_rfc3339(&path);
        let (found, links) = extract(&String::from_utf8_lossy(&bytes), &url, &source.rules);
        for rec in found {
            if keys.insert((url.to_string(), rec.audio_url.to_string())) {
                out.records.push(RawRecord {
                    source_url: url.to_string(),
                    text: rec.text,
                    audio_url: rec.audio_url.to_string(),
                    dialect: rec.dialect,
                    fetched_at: fetched_at.clone(),
                });
            }
        }
        for link in links {
            if seen.insert(link.clone()) {
                queue.push_back(link);
            }
        }
    }
    if out.records.is_empty() {
        return Err(IngestError::NoRecords(source.name.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub source_url: String,
    pub audio_url: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct MaterializeOutput {
    pub utterances: Vec<Utterance>,
    pub skipped: Vec<Skipped>,
}

fn short_hash(source_url: &str, audio_url: &str) -> String {
    let mut h = Sha256::new();
    h.update(source_url.as_bytes());
    h.update(b"\n");
    h.update(audio_url.as_bytes());
    hex::encode(h.finalize())[..10].to_string()
}

/// `<source>-<audio file stem>`, with a hash suffix when that name is
/// already taken by another (page, audio) pair.
fn utterance_id(source_name: &str, rec: &RawRecord, taken: &mut HashMap<String, (String, String)>) -> String {
    let stem = Url::parse(&rec.audio_url)
        .ok()
        .and_then(|u| u.path_segments().and_then(|mut s| s.next_back().map(str::to_string)))
        .map(|name| name.rsplit_once('.').map_or(name.clone(), |(s, _)| s.to_string()))
        .unwrap_or_default();
    let stem: String =
        stem.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    let key = (rec.source_url.clone(), rec.audio_url.clone());
    let base = if stem.is_empty() { format!("{source_name}-{}", short_hash(&key.0, &key.1)) } else { format!("{source_name}-{stem}") };
    match taken.get(&base) {
        Some(k) if *k != key => {
            let id = format!("{base}-{}", short_hash(&key.0, &key.1));
            taken.insert(id.clone(), key);
            id
        }
        _ => {
            taken.insert(base.clone(), key);
            base
        }
    }
}

/// Downloads each distinct audio URL once and turns records into scraped
/// utterances. Records whose audio cannot be fetched or decoded, or whose
/// dialect is unknown, are skipped and reported.
pub fn materialize(
    records: &[RawRecord],
    source: &SourceConfig,
    cache: &Cache,
    fetcher: &dyn Fetcher,
    limiter: &RateLimiter,
) -> MaterializeOutput {
    let mut audio: HashMap<String, Result<(PathBuf, u32, f64), String>> = HashMap::new();
    let mut out = MaterializeOutput::default();
    let mut taken = HashMap::new();
    for rec in records {
        let skip = |reason: String| Skipped {
            source_url: rec.source_url.clone(),
            audio_url: rec.audio_url.clone(),
            reason,
        };
        let dialect = match (&rec.dialect, source.dialect) {
            (Some(label), _) => match label.parse::<Dialect>() {
                Ok(d) => d,
                Err(e) => {
                    out.skipped.push(skip(e.to_string()));
                    continue;
                }
            },
            (None, Some(d)) => d,
            (None, None) => {
                out.skipped.push(skip("no dialect on page or in source config".into()));
                continue;
            }
        };
        let info = audio.entry(rec.audio_url.clone()).or_insert_with(|| {
            let url = Url::parse(&rec.audio_url).map_err(|e| e.to_string())?;
            let (path, _) = cache.fetch_through(CacheKind::Audio, &url, fetcher, limiter).map_err(|e| e.to_string())?;
            let buf = decode_wav(&path).map_err(|e| e.to_string())?;
            Ok((path, buf.sample_rate, buf.duration_s()))
        });
        match info {
            Ok((path, sr, dur)) => {
                let id = utterance_id(&source.name, rec, &mut taken);
                out.utterances.push(Utterance::scraped(
                    id,
                    dialect,
                    Source::new(source.kind.clone()),
                    path.clone(),
                    *sr,
                    *dur,
                    &rec.text,
                ));
            }
            Err(reason) => out.skipped.push(skip(reason.clone())),
        }
    }
    out
}
