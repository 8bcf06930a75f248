//! Viterbi forced alignment of a known symbol sequence against per-frame
//! acoustic log-scores, with optional silence between symbols.

mod scores;

use std::collections::HashMap;

use thiserror::Error;

pub use scores::{energy_scores, read_scores, write_scores};

/// Symbol name of the silence model.
pub const SIL: &str = "SIL";

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("score file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("score matrix has {rows} rows of width {width}, expected width {expected}")]
    Shape { rows: usize, width: usize, expected: usize },
    #[error("non-finite score at frame {frame}, symbol {symbol}")]
    NonFinite { frame: usize, symbol: String },
    #[error("symbol {0:?} is not in the score inventory")]
    UnknownSymbol(String),
    #[error("{frames} frames cannot hold {phones} phones")]
    TooFewFrames { frames: usize, phones: usize },
    #[error("empty phone sequence requires optional silence")]
    NothingToAlign,
    #[error("frame period must be positive, got {0}")]
    FramePeriod(f64),
}

/// Row-major `frames x symbols` matrix of log-scores.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticScores {
    frame_period_s: f64,
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl AcousticScores {
    pub fn new(frame_period_s: f64, symbols: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, AlignError> {
        if !(frame_period_s > 0.0 && frame_period_s.is_finite()) {
            return Err(AlignError::FramePeriod(frame_period_s));
        }
        let width = symbols.len();
        let mut data = Vec::with_capacity(rows.len() * width);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(AlignError::Shape { rows: rows.len(), width: row.len(), expected: width });
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(AlignError::NonFinite { frame: t, symbol: symbols[j].clone() });
            }
            data.extend_from_slice(row);
        }
        let index = symbols.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(AcousticScores { frame_period_s, symbols, index, data })
    }

    pub fn frame_period_s(&self) -> f64 {
        self.frame_period_s
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn n_frames(&self) -> usize {
        if self.symbols.is_empty() {
            0
        } else {
            self.data.len() / self.symbols.len()
        }
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn score(&self, frame: usize, symbol: usize) -> f64 {
        self.data[frame * self.symbols.len() + symbol]
    }

    pub fn row(&self, frame: usize) -> &[f64] {
        let w = self.symbols.len();
        &self.data[frame * w..(frame + 1) * w]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedSegment {
    pub symbol: String,
    /// First frame, inclusive.
    pub start: usize,
    /// One past the last frame.
    pub end: usize,
}

impl AlignedSegment {
    pub fn is_silence(&self) -> bool {
        self.symbol == SIL
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub segments: Vec<AlignedSegment>,
    /// Sum of the chosen per-frame scores, accumulated from frame 0.
    pub total_score: f64,
    pub n_frames: usize,
}

impl Alignment {
    /// Segment boundaries in seconds.
    pub fn times(&self, frame_period_s: f64) -> Vec<(String, f64, f64)> {
        self.segments
            .iter()
            .map(|s| (s.symbol.clone(), s.start as f64 * frame_period_s, s.end as f64 * frame_period_s))
            .collect()
    }

    /// Non-silence segments in order.
    pub fn phones(&self) -> impl Iterator<Item = &AlignedSegment> {
        self.segments.iter().filter(|s| !s.is_silence())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Phone,
    Sil,
}

// Backpointer codes.
const STAY: u8 = 0;
const FROM_PHONE: u8 = 1;
const FROM_SIL: u8 = 2;
const START: u8 = 3;

/// Finds the highest-scoring monotone segmentation of all frames into the
/// phones in order, each at least one frame, with an optional silence
/// before, between and after them when `allow_optional_silence` is set.
///
/// Ties prefer staying in the current state, then entering a phone from the
/// previous phone rather than from silence, then ending on the last phone.
pub fn force_align<S: AsRef<str>>(
    scores: &AcousticScores,
    phones: &[S],
    allow_optional_silence: bool,
) -> Result<Alignment, AlignError> {
    let t_max = scores.n_frames();
    let sil_col = if allow_optional_silence {
        Some(scores.symbol_index(SIL).ok_or_else(|| AlignError::UnknownSymbol(SIL.into()))?)
    } else {
        None
    };
    if phones.is_empty() && !allow_optional_silence {
        return Err(AlignError::NothingToAlign);
    }
    if t_max < phones.len().max(1) {
        return Err(AlignError::TooFewFrames { frames: t_max, phones: phones.len() });
    }

    // States: [SIL0] p1 [SIL1] p2 ... pk [SILk]
    let mut states: Vec<(usize, Kind)> = Vec::new();
    if let Some(c) = sil_col {
        states.push((c, Kind::Sil));
    }
    for p in phones {
        let p = p.as_ref();
        let col = scores.symbol_index(p).ok_or_else(|| AlignError::UnknownSymbol(p.into()))?;
        states.push((col, Kind::Phone));
        if let Some(c) = sil_col {
            states.push((c, Kind::Sil));
        }
    }
    let n = states.len();
    let stride = if sil_col.is_some() { 2 } else { 1 };
    let first_phone = if sil_col.is_some() { 1 } else { 0 };

    // Predecessors other than self: (phone, sil) state indices.
    let preds: Vec<(Option<usize>, Option<usize>)> = (0..n)
        .map(|s| match states[s].1 {
            Kind::Sil => (if s == 0 { None } else { Some(s - 1) }, None),
            Kind::Phone => {
                let prev_phone = s.checked_sub(stride).filter(|&p| p >= first_phone && states[p].1 == Kind::Phone);
                let prev_sil = if sil_col.is_some() { Some(s - 1) } else { None };
                (prev_phone, prev_sil)
            }
        })
        .collect();

    let neg = f64::NEG_INFINITY;
    let mut cur = vec![neg; n];
    let mut back = vec![START; t_max * n];
    for s in 0..n {
        let can_start = s == 0 || (s == first_phone && states[s].1 == Kind::Phone);
        if can_start {
            cur[s] = scores.score(0, states[s].0);
        }
    }
    let mut next = vec![neg; n];
    for t in 1..t_max {
        for s in 0..n {
            let mut best = cur[s];
            let mut code = STAY;
            let (pp, ps) = preds[s];
            if let Some(p) = pp {
                if cur[p] > best {
                    best = cur[p];
                    code = FROM_PHONE;
                }
            }
            if let Some(p) = ps {
                if cur[p] > best {
                    best = cur[p];
                    code = FROM_SIL;
                }
            }
            next[s] = if best == neg { neg } else { best + scores.score(t, states[s].0) };
            back[t * n + s] = code;
        }
        std::mem::swap(&mut cur, &mut next);
    }

    // Final state: last phone, else trailing silence (or the lone SIL).
    let last = n - 1;
    let end = if phones.is_empty() {
        0
    } else if sil_col.is_some() {
        if cur[last - 1] >= cur[last] {
            last - 1
        } else {
            last
        }
    } else {
        last
    };
    let total_score = cur[end];
    debug_assert!(total_score.is_finite());

    let mut path = vec![0usize; t_max];
    let mut s = end;
    for t in (0..t_max).rev() {
        path[t] = s;
        if t == 0 {
            break;
        }
        s = match back[t * n + s] {
            STAY => s,
            FROM_PHONE => preds[s].0.expect("phone predecessor"),
            _ => preds[s].1.expect("silence predecessor"),
        };
    }

    let mut segments: Vec<AlignedSegment> = Vec::new();
    let mut prev_state = usize::MAX;
    for (t, &s) in path.iter().enumerate() {
        if s == prev_state {
            segments.last_mut().expect("open segment").end = t + 1;
        } else {
            segments.push(AlignedSegment { symbol: scores.symbols[states[s].0].clone(), start: t, end: t + 1 });
            prev_state = s;
        }
    }
    Ok(Alignment { segments, total_score, n_frames: t_max })
}

/// Silence intervals in seconds, with adjacent silence segments merged.
pub fn silence_intervals(alignment: &Alignment, frame_period_s: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for seg in alignment.segments.iter().filter(|s| s.is_silence()) {
        match out.last_mut() {
            Some(last) if last.1 == seg.start => last.1 = seg.end,
            _ => out.push((seg.start, seg.end)),
        }
    }
    out.into_iter()
        .map(|(a, b)| (a as f64 * frame_period_s, b as f64 * frame_period_s))
        .collect()
}

/// A segment with times in seconds, as stored in alignment files.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedSegment {
    pub symbol: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl TimedSegment {
    pub fn is_silence(&self) -> bool {
        self.symbol == SIL
    }
}

/// Tab-separated `symbol start_s end_s`, one segment per line.
pub fn render_alignment(alignment: &Alignment, frame_period_s: f64) -> String {
    let mut out = format!("# frame_period_s={frame_period_s}\n");
    for (sym, a, b) in alignment.times(frame_period_s) {
        out.push_str(&format!("{sym}\t{a:.6}\t{b:.6}\n"));
    }
    out
}

pub fn parse_alignment(src: &str) -> Result<Vec<TimedSegment>, AlignError> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| AlignError::Parse { line: i + 1, message: message.to_string() };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(err("expected symbol, start and end"));
        }
        let start_s: f64 = f[1].parse().map_err(|_| err("bad start time"))?;
        let end_s: f64 = f[2].parse().map_err(|_| err("bad end time"))?;
        if !(start_s >= 0.0 && end_s >= start_s) {
            return Err(err("times must satisfy 0 <= start <= end"));
        }
        out.push(TimedSegment { symbol: f[0].to_string(), start_s, end_s });
    }
    Ok(out)
}

pub fn write_alignment(path: impl AsRef<std::path::Path>, alignment: &Alignment, frame_period_s: f64) -> Result<(), AlignError> {
    std::fs::write(path, render_alignment(alignment, frame_period_s))?;
    Ok(())
}

pub fn read_alignment(path: impl AsRef<std::path::Path>) -> Result<Vec<TimedSegment>, AlignError> {
    parse_alignment(&std::fs::read_to_string(path)?)
}

/// Silence intervals of a stored alignment, adjacent ones merged.
pub fn timed_silences(segments: &[TimedSegment]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for s in segments.iter().filter(|s| s.is_silence()) {
        match out.last_mut() {
            Some(last) if (last.1 - s.start_s).abs() < 1e-9 => last.1 = s.end_s,
            _ => out.push((s.start_s, s.end_s)),
        }
    }
    out
}
