use crate::g2p::PhonemeSequence;

use super::{secs_to_samples, AudioBuffer, AudioError, Segment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimParams {
    /// Internal silences strictly longer than this split the recording.
    pub threshold_s: f64,
    /// Silence kept on each side of a cut, and at the recording edges.
    pub pad_s: f64,
}

impl Default for TrimParams {
    fn default() -> Self {
        TrimParams { threshold_s: 0.05, pad_s: 0.025 }
    }
}

/// Text and phonemes for one speech region, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanLabel {
    pub text: String,
    pub phonemes: PhonemeSequence,
}

/// One speech region in samples, with the silence kept at each edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub start: usize,
    pub end: usize,
    pub lead: usize,
    pub tail: usize,
}

/// Speech regions of an `n`-sample recording: edge silence trimmed to at
/// most the pad, and a cut at every internal silence strictly longer than
/// the threshold, keeping the pad on both sides of the cut. `silences` are
/// `(start, end)` seconds, sorted and non-overlapping; touching silences are
/// merged.
pub fn speech_regions(
    n: usize,
    sample_rate: u32,
    silences: &[(f64, f64)],
    params: TrimParams,
) -> Result<Vec<Region>, AudioError> {
    if !(params.pad_s >= 0.0 && 2.0 * params.pad_s <= params.threshold_s + 1e-12) {
        return Err(AudioError::BadParams { threshold_s: params.threshold_s, pad_s: params.pad_s });
    }
    let threshold = secs_to_samples(params.threshold_s, sample_rate);
    let pad = secs_to_samples(params.pad_s, sample_rate);
    let duration_s = n as f64 / sample_rate as f64;

    let mut sil: Vec<(usize, usize)> = Vec::with_capacity(silences.len());
    for (index, &(start_s, end_s)) in silences.iter().enumerate() {
        let bad = || AudioError::BadSilence { index, start_s, end_s, duration_s };
        if !(start_s.is_finite() && end_s.is_finite() && start_s >= 0.0 && start_s <= end_s) {
            return Err(bad());
        }
        let s = secs_to_samples(start_s, sample_rate);
        let e = secs_to_samples(end_s, sample_rate);
        if e > n + 1 {
            return Err(bad());
        }
        let e = e.min(n);
        if s >= e {
            continue;
        }
        match sil.last_mut() {
            Some(last) if s < last.1 => return Err(bad()),
            Some(last) if s == last.1 => last.1 = e,
            _ => sil.push((s, e)),
        }
    }
    if n == 0 || sil.first() == Some(&(0, n)) {
        return Ok(Vec::new());
    }

    let mut regions = Vec::new();
    let mut cur = Region { start: 0, end: n, lead: 0, tail: 0 };
    for &(s, e) in &sil {
        let len = e - s;
        if s == 0 {
            cur.lead = pad.min(len);
            cur.start = e - cur.lead;
        } else if e == n {
            cur.tail = pad.min(len);
            cur.end = s + cur.tail;
        } else if len > threshold {
            regions.push(Region { end: s + pad, tail: pad, ..cur });
            cur = Region { start: e - pad, end: n, lead: pad, tail: 0 };
        }
    }
    regions.push(cur);
    Ok(regions)
}

/// Cuts `audio` into the regions of [`speech_regions`], labelling each
/// with the matching span.
pub fn trim_and_split(
    audio: &AudioBuffer,
    silences: &[(f64, f64)],
    params: TrimParams,
    spans: &[SpanLabel],
    source_utterance_id: &str,
) -> Result<Vec<Segment>, AudioError> {
    let sr = audio.sample_rate;
    let regions = speech_regions(audio.len(), sr, silences, params)?;
    if regions.len() != spans.len() {
        return Err(AudioError::SpanMismatch { regions: regions.len(), spans: spans.len() });
    }
    let srf = sr as f64;
    regions
        .into_iter()
        .zip(spans)
        .enumerate()
        .map(|(i, (r, span))| {
            if span.text.trim().is_empty() {
                return Err(AudioError::EmptySpan(i));
            }
            Ok(Segment {
                audio: AudioBuffer::new(audio.samples[r.start..r.end].to_vec(), sr),
                text: span.text.clone(),
                phonemes: span.phonemes.clone(),
                source_utterance_id: source_utterance_id.to_string(),
                offset_in_source_s: r.start as f64 / srf,
                leading_silence_s: r.lead as f64 / srf,
                trailing_silence_s: r.tail as f64 / srf,
                source_range: r.start..r.end,
            })
        })
        .collect()
}
