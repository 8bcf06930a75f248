//! Domain types shared by every pipeline stage, plus the JSON Lines
//! manifest format.

mod config;
mod manifest;
pub mod seconds;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::g2p::PhonemeSequence;

pub use config::{ConfigError, PipelineConfig};
pub use manifest::{
    read_manifest, validate_manifest, write_manifest, AudioCheck, ManifestError, ValidationReport,
    Violation, ViolationKind, MANIFEST_HEADER,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = concat!("corpus-forge ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown dialect {0:?}")]
pub struct UnknownDialect(pub String);

/// The six major Taiwanese Hakka dialects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dialect {
    Sixian,
    Hailu,
    Dapu,
    Raoping,
    Zhaoan,
    Nansixian,
}

impl Dialect {
    pub const ALL: [Dialect; 6] = [
        Dialect::Sixian,
        Dialect::Hailu,
        Dialect::Dapu,
        Dialect::Raoping,
        Dialect::Zhaoan,
        Dialect::Nansixian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Sixian => "Sixian",
            Dialect::Hailu => "Hailu",
            Dialect::Dapu => "Dapu",
            Dialect::Raoping => "Raoping",
            Dialect::Zhaoan => "Zhaoan",
            Dialect::Nansixian => "Nansixian",
        }
    }

    pub fn hanzi(self) -> &'static str {
        match self {
            Dialect::Sixian => "四縣",
            Dialect::Hailu => "海陸",
            Dialect::Dapu => "大埔",
            Dialect::Raoping => "饒平",
            Dialect::Zhaoan => "詔安",
            Dialect::Nansixian => "南四縣",
        }
    }

    /// e.g. `Sixian (四縣)`.
    pub fn display_name(self) -> String {
        format!("{} ({})", self.name(), self.hanzi())
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = UnknownDialect;

    /// Accepts the romanized name (any case) or the Hanzi name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dialect::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s) || d.hanzi() == s)
            .ok_or_else(|| UnknownDialect(s.to_owned()))
    }
}

impl Serialize for Dialect {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Dialect {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where a record was scraped from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceKind {
    Dict,
    Exam,
    Radio,
    Other(String),
}

impl SourceKind {
    pub fn label(&self) -> &str {
        match self {
            SourceKind::Dict => "DICT",
            SourceKind::Exam => "EXAM",
            SourceKind::Radio => "RADIO",
            SourceKind::Other(name) => name,
        }
    }

    pub fn default_quality(&self) -> Quality {
        match self {
            SourceKind::Dict | SourceKind::Exam => Quality::WellTranscribed,
            SourceKind::Radio | SourceKind::Other(_) => Quality::IllTranscribed,
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl From<&str> for SourceKind {
    fn from(s: &str) -> Self {
        match s {
            "DICT" => SourceKind::Dict,
            "EXAM" => SourceKind::Exam,
            "RADIO" => SourceKind::Radio,
            other => SourceKind::Other(other.to_owned()),
        }
    }
}

impl Serialize for SourceKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for SourceKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s.is_empty() {
            return Err(serde::de::Error::custom("empty source kind"));
        }
        Ok(SourceKind::from(s.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quality {
    WellTranscribed,
    IllTranscribed,
}

/// Source kind plus its transcription-quality tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Source {
    pub kind: SourceKind,
    pub quality: Quality,
}

impl Source {
    /// Source with the kind's default quality.
    pub fn new(kind: SourceKind) -> Self {
        let quality = kind.default_quality();
        Source { kind, quality }
    }
}

impl<'de> Deserialize<'de> for Source {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: SourceKind,
            quality: Option<Quality>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let quality = raw.quality.unwrap_or_else(|| raw.kind.default_quality());
        Ok(Source { kind: raw.kind, quality })
    }
}

/// Pipeline stages in their required order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Scraped,
    Cleaned,
    Aligned,
    Segmented,
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stage: Stage,
    pub timestamp: String,
    pub tool: String,
}

impl Provenance {
    pub fn now(stage: Stage) -> Self {
        Provenance {
            stage,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            tool: TOOL_VERSION.to_owned(),
        }
    }
}

/// Where a segment came from within its source recording and how much edge
/// silence it kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentInfo {
    pub source_utterance_id: String,
    #[serde(with = "seconds")]
    pub offset_in_source_s: f64,
    #[serde(with = "seconds")]
    pub leading_silence_s: f64,
    #[serde(with = "seconds")]
    pub trailing_silence_s: f64,
}

/// One audio + transcript record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub dialect: Dialect,
    pub source: Source,
    pub audio_path: PathBuf,
    pub sample_rate: u32,
    #[serde(with = "seconds")]
    pub duration_s: f64,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<PhonemeSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker_id: Option<String>,
    pub stage: Stage,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<SegmentInfo>,
    /// Fields this version does not know about, kept verbatim.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Utterance {
    /// A freshly scraped record.
    pub fn scraped(
        id: impl Into<String>,
        dialect: Dialect,
        source: Source,
        audio_path: impl Into<PathBuf>,
        sample_rate: u32,
        duration_s: f64,
        text: &str,
    ) -> Self {
        Utterance {
            id: id.into(),
            dialect,
            source,
            audio_path: audio_path.into(),
            sample_rate,
            duration_s,
            text: crate::text::nfc(text),
            phonemes: None,
            speaker_id: None,
            stage: Stage::Scraped,
            provenance: vec![Provenance::now(Stage::Scraped)],
            segment: None,
            extra: BTreeMap::new(),
        }
    }

    /// Moves the record to `stage` and stamps provenance.
    pub fn advance(&mut self, stage: Stage) {
        self.stage = stage;
        self.provenance.push(Provenance::now(stage));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub schema_version: u32,
    pub records: Vec<Utterance>,
}

impl Default for CorpusManifest {
    fn default() -> Self {
        CorpusManifest { schema_version: SCHEMA_VERSION, records: Vec::new() }
    }
}

impl CorpusManifest {
    pub fn new(records: Vec<Utterance>) -> Self {
        CorpusManifest { schema_version: SCHEMA_VERSION, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
