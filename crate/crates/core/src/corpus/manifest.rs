use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{CorpusManifest, Stage, Utterance, SCHEMA_VERSION};
use crate::text::is_nfc_normalized;

pub const MANIFEST_HEADER: &str = "# corpus-forge manifest";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Line { path: PathBuf, line: usize, message: String },
    #[error("manifest failed validation: {0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    DuplicateId,
    NonPositiveDuration(f64),
    ZeroSampleRate,
    EmptyText,
    TextNotNfc,
    MissingPhonemes(Stage),
    UnexpectedPhonemes(Stage),
    PausesOutOfRange,
    MissingAudio(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub id: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = &self.id;
        match &self.kind {
            ViolationKind::DuplicateId => write!(f, "{id}: duplicate id"),
            ViolationKind::NonPositiveDuration(d) => {
                write!(f, "{id}: duration {d} s is not positive")
            }
            ViolationKind::ZeroSampleRate => write!(f, "{id}: sample_rate must be positive"),
            ViolationKind::EmptyText => write!(f, "{id}: empty text"),
            ViolationKind::TextNotNfc => write!(f, "{id}: text is not NFC-normalized"),
            ViolationKind::MissingPhonemes(s) => write!(f, "{id}: stage {s:?} requires phonemes"),
            ViolationKind::UnexpectedPhonemes(s) => {
                write!(f, "{id}: stage {s:?} must not carry phonemes")
            }
            ViolationKind::PausesOutOfRange => write!(f, "{id}: pause position out of range"),
            ViolationKind::MissingAudio(p) => write!(f, "{id}: audio file {} not found", p.display()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Ids with at least one violation, in first-seen order.
    pub fn offending_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for v in &self.violations {
            if !ids.contains(&v.id.as_str()) {
                ids.push(&v.id);
            }
        }
        ids
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Whether validation checks that audio files exist.
#[derive(Debug, Clone)]
pub enum AudioCheck {
    Lenient,
    /// Relative audio paths are resolved against `base_dir`.
    Strict { base_dir: PathBuf },
}

/// Collects every invariant violation. Never modifies the manifest.
pub fn validate_manifest(manifest: &CorpusManifest, audio: &AudioCheck) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for rec in &manifest.records {
        let mut push = |kind| violations.push(Violation { id: rec.id.clone(), kind });
        let count = seen.entry(rec.id.as_str()).or_insert(0);
        *count += 1;
        if *count == 2 {
            push(ViolationKind::DuplicateId);
        }
        let duration_bad = if rec.stage > Stage::Scraped {
            rec.duration_s.is_nan() || rec.duration_s <= 0.0
        } else {
            rec.duration_s.is_nan() || rec.duration_s < 0.0
        };
        if duration_bad || !rec.duration_s.is_finite() {
            push(ViolationKind::NonPositiveDuration(rec.duration_s));
        }
        if rec.sample_rate == 0 {
            push(ViolationKind::ZeroSampleRate);
        }
        if rec.text.trim().is_empty() {
            push(ViolationKind::EmptyText);
        } else if !is_nfc_normalized(&rec.text) {
            push(ViolationKind::TextNotNfc);
        }
        match (&rec.phonemes, rec.stage >= Stage::Aligned) {
            (None, true) => push(ViolationKind::MissingPhonemes(rec.stage)),
            (Some(_), false) => push(ViolationKind::UnexpectedPhonemes(rec.stage)),
            (Some(p), true) if !p.pauses_valid() => push(ViolationKind::PausesOutOfRange),
            _ => {}
        }
        if let AudioCheck::Strict { base_dir } = audio {
            let path = base_dir.join(&rec.audio_path);
            if !path.is_file() {
                push(ViolationKind::MissingAudio(rec.audio_path.clone()));
            }
        }
    }
    ValidationReport { violations }
}

/// Writes one JSON object per line after a `#` header. Refuses manifests
/// that fail lenient validation.
pub fn write_manifest(manifest: &CorpusManifest, path: impl AsRef<Path>) -> Result<(), ManifestError> {
    let path = path.as_ref();
    let report = validate_manifest(manifest, &AudioCheck::Lenient);
    if !report.is_ok() {
        return Err(ManifestError::Invalid(report));
    }
    let io_err = |source| ManifestError::Io { path: path.to_owned(), source };
    let tmp = tmp_path(path);
    {
        let file = std::fs::File::create(&tmp).map_err(io_err)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{MANIFEST_HEADER} schema_version={}", manifest.schema_version)
            .map_err(io_err)?;
        for rec in &manifest.records {
            let line = serde_json::to_string(rec).map_err(|e| ManifestError::Line {
                path: path.to_owned(),
                line: 0,
                message: format!("cannot serialize {}: {e}", rec.id),
            })?;
            writeln!(out, "{line}").map_err(io_err)?;
        }
        out.flush().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Reads a manifest, reporting the first malformed line, then validates it
/// leniently (audio existence is not checked).
pub fn read_manifest(path: impl AsRef<Path>) -> Result<CorpusManifest, ManifestError> {
    let path = path.as_ref();
    let io_err = |source| ManifestError::Io { path: path.to_owned(), source };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut schema_version = SCHEMA_VERSION;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(v) = comment.split("schema_version=").nth(1) {
                schema_version = v.trim().parse().map_err(|_| ManifestError::Line {
                    path: path.to_owned(),
                    line: idx + 1,
                    message: format!("bad schema_version {v:?}"),
                })?;
            }
            continue;
        }
        let mut rec: Utterance = serde_json::from_str(trimmed).map_err(|e| ManifestError::Line {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        rec.text = crate::text::nfc(&rec.text);
        records.push(rec);
    }
    let manifest = CorpusManifest { schema_version, records };
    let report = validate_manifest(&manifest, &AudioCheck::Lenient);
    if !report.is_ok() {
        return Err(ManifestError::Invalid(report));
    }
    Ok(manifest)
}
