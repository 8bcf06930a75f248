use super::{secs_to_samples, AudioBuffer, AudioError, Segment};

/// Silence samples contributed by the left and right side of a junction:
/// `floor(total / 2)` and the remainder.
pub fn junction_samples(pause_s: f64, sample_rate: u32) -> (usize, usize) {
    let total = secs_to_samples(pause_s, sample_rate);
    (total / 2, total - total / 2)
}

/// Joins two segments so that exactly `pause_s` of silence separates their
/// speech, padding with zeros or trimming the existing edge silence. The
/// text is joined with a single full-width comma and the phonemes with one
/// pause.
pub fn concatenate(a: &Segment, b: &Segment, pause_s: f64) -> Result<Segment, AudioError> {
    let sr = a.audio.sample_rate;
    if b.audio.sample_rate != sr {
        return Err(AudioError::SampleRateMismatch(sr, b.audio.sample_rate));
    }
    let (want_a, want_b) = junction_samples(pause_s, sr);
    let have_a = secs_to_samples(a.trailing_silence_s, sr).min(a.audio.len());
    let have_b = secs_to_samples(b.leading_silence_s, sr).min(b.audio.len());

    let a_keep = a.audio.len() - have_a.saturating_sub(want_a);
    let b_skip = have_b.saturating_sub(want_b);
    let mut samples = Vec::with_capacity(a_keep + want_a + want_b + b.audio.len());
    samples.extend_from_slice(&a.audio.samples[..a_keep]);
    samples.resize(samples.len() + want_a.saturating_sub(have_a), 0.0);
    samples.resize(samples.len() + want_b.saturating_sub(have_b), 0.0);
    samples.extend_from_slice(&b.audio.samples[b_skip..]);

    Ok(Segment {
        audio: AudioBuffer::new(samples, sr),
        text: format!("{}，{}", a.text, b.text),
        phonemes: a.phonemes.join_with_pause(&b.phonemes),
        source_utterance_id: a.source_utterance_id.clone(),
        offset_in_source_s: a.offset_in_source_s,
        leading_silence_s: a.leading_silence_s,
        trailing_silence_s: b.trailing_silence_s,
        source_range: a.source_range.clone(),
    })
}
