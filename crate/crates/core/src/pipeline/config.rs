use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ConfigError, PipelineConfig};
use crate::ingest::{IngestError, SourceConfig};

/// Environment variable that replaces `paths.cache_dir`.
pub const CACHE_ENV: &str = "FORGE_CACHE_DIR";

#[derive(Debug, Error)]
pub enum RunConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid [pipeline] section: {0}")]
    Pipeline(#[from] ConfigError),
    #[error("invalid [[ingest.sources]] entry: {0}")]
    Source(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub output_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub lexicon: Option<PathBuf>,
    /// Extra plain-text lines for the background language model.
    pub lm_corpus: Option<PathBuf>,
    /// `<id>.nbest` files for ill-transcribed utterances.
    pub nbest_dir: Option<PathBuf>,
    /// `<id>.scores` acoustic score files; utterances without one are scored
    /// by the energy detector.
    pub scores_dir: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            output_dir: "out".into(),
            cache_dir: "cache".into(),
            lexicon: None,
            lm_corpus: None,
            nbest_dir: None,
            scores_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub sources: Vec<SourceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignSection {
    pub allow_optional_silence: bool,
    /// Frame period of the energy scorer.
    pub frame_period_s: f64,
    pub energy_threshold_db: f64,
}

impl Default for AlignSection {
    fn default() -> Self {
        AlignSection { allow_optional_silence: true, frame_period_s: 0.01, energy_threshold_db: -35.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentSection {
    /// Use the energy detector for utterances without an alignment.
    pub energy_fallback: bool,
    pub floor_db: f64,
    pub min_frames: usize,
}

impl Default for SegmentSection {
    fn default() -> Self {
        SegmentSection { energy_fallback: false, floor_db: -40.0, min_frames: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct G2pSection {
    pub strict: bool,
}

impl Default for G2pSection {
    fn default() -> Self {
        G2pSection { strict: true }
    }
}

/// Everything a pipeline run reads from its config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub paths: Paths,
    pub ingest: IngestSection,
    pub align: AlignSection,
    pub segment: SegmentSection,
    pub g2p: G2pSection,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn absolutize(base: &Path, p: &Path) -> PathBuf {
    let joined = base.join(p);
    std::path::absolute(&joined).unwrap_or(joined)
}

impl RunConfig {
    pub fn parse(src: &str, path_label: &str, base_dir: &Path) -> Result<Self, RunConfigError> {
        let mut cfg: RunConfig =
            toml::from_str(src).map_err(|source| RunConfigError::Toml { path: path_label.to_string(), source })?;
        cfg.base_dir = absolutize(Path::new("."), base_dir);
        cfg.resolve_paths();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths in it are taken from the file's
    /// directory, and `FORGE_CACHE_DIR` overrides the cache location.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RunConfigError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)
            .map_err(|source| RunConfigError::Io { path: path.display().to_string(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = Self::parse(&src, &path.display().to_string(), base)?;
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            cfg.paths.cache_dir = absolutize(Path::new("."), Path::new(&dir));
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self) {
        let base = self.base_dir.clone();
        let p = &mut self.paths;
        p.output_dir = absolutize(&base, &p.output_dir);
        p.cache_dir = absolutize(&base, &p.cache_dir);
        for opt in [&mut p.lexicon, &mut p.lm_corpus, &mut p.nbest_dir, &mut p.scores_dir] {
            if let Some(v) = opt.as_mut() {
                *v = absolutize(&base, v);
            }
        }
        for s in &mut self.ingest.sources {
            if let Some(c) = s.cache_dir.as_mut() {
                *c = absolutize(&base, c);
            }
        }
    }

    pub fn validate(&self) -> Result<(), RunConfigError> {
        self.pipeline.validate()?;
        for s in &self.ingest.sources {
            s.validate()?;
        }
        Ok(())
    }
}
