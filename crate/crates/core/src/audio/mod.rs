//! Mono audio buffers, WAV I/O, alignment-driven trimming and splitting,
//! and pairwise concatenation with a fixed junction pause.

mod concat;
mod trim;
mod vad;
mod wav;

use std::ops::Range;

use thiserror::Error;

use crate::g2p::PhonemeSequence;

pub use concat::{concatenate, junction_samples};
pub use trim::{speech_regions, trim_and_split, Region, SpanLabel, TrimParams};
pub use vad::{detect_silences, frame_rms_db, EnergyVad};
pub use wav::{decode_wav, encode_wav};

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: truncated WAV data, file ends at byte {offset}")]
    Truncated { path: String, offset: u64 },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),
    #[error("silence {index} ({start_s:.3}-{end_s:.3} s) is inconsistent with {duration_s:.3} s of audio or its neighbours")]
    BadSilence {
        index: usize,
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },
    #[error("{regions} speech regions but {spans} text spans")]
    SpanMismatch { regions: usize, spans: usize },
    #[error("text span {0} is empty")]
    EmptySpan(usize),
    #[error("invalid trim parameters: 2 x pad {pad_s} s must not exceed threshold {threshold_s} s")]
    BadParams { threshold_s: f64, pad_s: f64 },
}

/// Mono samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample rate must be positive");
        AudioBuffer { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Nearest sample index for a time in seconds.
    pub fn sample_at(&self, t: f64) -> usize {
        secs_to_samples(t, self.sample_rate)
    }
}

pub(crate) fn secs_to_samples(t: f64, sample_rate: u32) -> usize {
    (t * sample_rate as f64).round().max(0.0) as usize
}

/// A contiguous piece of one source recording with its text.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub audio: AudioBuffer,
    pub text: String,
    pub phonemes: PhonemeSequence,
    pub source_utterance_id: String,
    pub offset_in_source_s: f64,
    /// Silence kept before the first speech sample.
    pub leading_silence_s: f64,
    /// Silence kept after the last speech sample.
    pub trailing_silence_s: f64,
    /// Sample range in the source recording; for concatenations, the range
    /// of the first part.
    pub source_range: Range<usize>,
}

impl Segment {
    pub fn duration_s(&self) -> f64 {
        self.audio.duration_s()
    }
}
