use super::AudioBuffer;

/// RMS level in dBFS of consecutive `frame_s` windows; the last window may
/// be short. Digital silence reads as `-inf`.
pub fn frame_rms_db(audio: &AudioBuffer, frame_s: f64) -> Vec<f64> {
    let frame = ((frame_s * audio.sample_rate as f64).round() as usize).max(1);
    audio
        .samples
        .chunks(frame)
        .map(|c| {
            let energy = c.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>() / c.len() as f64;
            10.0 * energy.log10()
        })
        .collect()
}

/// Energy detector used when no alignment is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyVad {
    pub frame_s: f64,
    pub floor_db: f64,
    pub min_frames: usize,
}

impl Default for EnergyVad {
    fn default() -> Self {
        EnergyVad { frame_s: 0.010, floor_db: -40.0, min_frames: 3 }
    }
}

/// Silence intervals in seconds: runs of at least `min_frames` frames whose
/// RMS falls below `floor_db`.
pub fn detect_silences(audio: &AudioBuffer, vad: &EnergyVad) -> Vec<(f64, f64)> {
    let levels = frame_rms_db(audio, vad.frame_s);
    let frame = ((vad.frame_s * audio.sample_rate as f64).round() as usize).max(1);
    let sr = audio.sample_rate as f64;
    let mut out = Vec::new();
    let mut run_start = None;
    for i in 0..=levels.len() {
        let quiet = i < levels.len() && levels[i] < vad.floor_db;
        match (quiet, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                if i - s >= vad.min_frames.max(1) {
                    let start = s * frame;
                    let end = (i * frame).min(audio.len());
                    out.push((start as f64 / sr, end as f64 / sr));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    out
}
