use std::fmt::Write as _;
use std::path::Path;

use crate::audio::{frame_rms_db, AudioBuffer};

use super::{AcousticScores, AlignError, SIL};

/// Parses the text score format:
///
/// ```text
/// frame_period_s=0.01
/// SIL ho3 ka1
/// -0.1 -5.0 -4.2
/// ...
/// ```
///
/// Lines starting with `#` and blank lines are ignored.
pub fn read_scores(path: impl AsRef<Path>) -> Result<AcousticScores, AlignError> {
    parse_scores(&std::fs::read_to_string(path)?)
}

pub(crate) fn parse_scores(input: &str) -> Result<AcousticScores, AlignError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, message: &str| AlignError::Parse { line, message: message.into() };

    let (n, header) = lines.next().ok_or_else(|| err(1, "missing frame_period_s header"))?;
    let period = header
        .strip_prefix("frame_period_s=")
        .ok_or_else(|| err(n, "expected frame_period_s=<seconds>"))?
        .trim()
        .parse::<f64>()
        .map_err(|e| err(n, &e.to_string()))?;
    let (_, syms) = lines.next().ok_or_else(|| err(n + 1, "missing symbol line"))?;
    let symbols: Vec<String> = syms.split_whitespace().map(str::to_string).collect();

    let mut rows = Vec::new();
    for (n, line) in lines {
        let row = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(n, &e.to_string()))?;
        if row.len() != symbols.len() {
            return Err(err(n, &format!("expected {} scores, found {}", symbols.len(), row.len())));
        }
        rows.push(row);
    }
    AcousticScores::new(period, symbols, rows)
}

pub(crate) fn render_scores(scores: &AcousticScores) -> String {
    let mut out = format!("frame_period_s={}\n{}\n", scores.frame_period_s(), scores.symbols().join(" "));
    for t in 0..scores.n_frames() {
        let row: Vec<String> = scores.row(t).iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn write_scores(scores: &AcousticScores, path: impl AsRef<Path>) -> Result<(), AlignError> {
    std::fs::write(path, render_scores(scores))?;
    Ok(())
}

/// Toy two-class scorer: each frame's RMS level is squashed into a speech
/// probability around `threshold_db`; `SIL` gets the log of its complement
/// and every other symbol the log of the speech probability.
pub fn energy_scores(
    audio: &AudioBuffer,
    frame_period_s: f64,
    threshold_db: f64,
    symbols: &[String],
) -> Result<AcousticScores, AlignError> {
    const SOFTNESS_DB: f64 = 3.0;
    const EPS: f64 = 1e-6;
    let rows = frame_rms_db(audio, frame_period_s)
        .into_iter()
        .map(|db| {
            let x = if db.is_finite() { (db - threshold_db) / SOFTNESS_DB } else { -50.0 };
            let p = 1.0 / (1.0 + (-x).exp());
            let (speech, sil) = ((p + EPS).ln(), (1.0 - p + EPS).ln());
            symbols.iter().map(|s| if s == SIL { sil } else { speech }).collect()
        })
        .collect();
    AcousticScores::new(frame_period_s, symbols.to_vec(), rows)
}
